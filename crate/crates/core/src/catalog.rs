//! The anti-pattern catalog: 26 kinds across four categories, each with the
//! impact-metric flags used to derive default ranking inputs.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    LogicalDesign,
    PhysicalDesign,
    Query,
    Data,
}

impl Category {
    pub fn id(self) -> &'static str {
        match self {
            Category::LogicalDesign => "logical_design",
            Category::PhysicalDesign => "physical_design",
            Category::Query => "query",
            Category::Data => "data",
        }
    }

    pub const ALL: [Category; 4] = [
        Category::LogicalDesign,
        Category::PhysicalDesign,
        Category::Query,
        Category::Data,
    ];
}

/// Direction of the data-amplification change when the anti-pattern is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DaDirection {
    Up,
    Down,
    None,
}

/// Which of the five catalog metrics an anti-pattern affects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImpactFlags {
    pub performance: bool,
    pub maintainability: bool,
    pub data_amplification: bool,
    pub data_integrity: bool,
    pub accuracy: bool,
    pub da_direction: DaDirection,
}

const fn flags(p: bool, m: bool, da: DaDirection, di: bool, a: bool) -> ImpactFlags {
    ImpactFlags {
        performance: p,
        maintainability: m,
        data_amplification: !matches!(da, DaDirection::None),
        data_integrity: di,
        accuracy: a,
        da_direction: da,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AntiPatternKind {
    // Logical design
    MultiValuedAttribute,
    NoPrimaryKey,
    NoForeignKey,
    GenericPrimaryKey,
    DataInMetadata,
    AdjacencyList,
    GodTable,
    // Physical design
    RoundingErrors,
    EnumeratedTypes,
    ExternalDataStorage,
    IndexOveruse,
    IndexUnderuse,
    CloneTable,
    // Query
    ColumnWildcardUsage,
    ConcatenateNulls,
    OrderingByRand,
    PatternMatching,
    ImplicitColumns,
    DistinctAndJoin,
    TooManyJoins,
    // Data
    MissingTimezone,
    IncorrectDataType,
    DenormalizedTable,
    InformationDuplication,
    RedundantColumn,
    NoDomainConstraint,
}

use AntiPatternKind::*;
use DaDirection::{Down, Up};

impl AntiPatternKind {
    pub const ALL: [AntiPatternKind; 26] = [
        MultiValuedAttribute,
        NoPrimaryKey,
        NoForeignKey,
        GenericPrimaryKey,
        DataInMetadata,
        AdjacencyList,
        GodTable,
        RoundingErrors,
        EnumeratedTypes,
        ExternalDataStorage,
        IndexOveruse,
        IndexUnderuse,
        CloneTable,
        ColumnWildcardUsage,
        ConcatenateNulls,
        OrderingByRand,
        PatternMatching,
        ImplicitColumns,
        DistinctAndJoin,
        TooManyJoins,
        MissingTimezone,
        IncorrectDataType,
        DenormalizedTable,
        InformationDuplication,
        RedundantColumn,
        NoDomainConstraint,
    ];

    /// Stable catalog position, used for deterministic tie-breaking.
    pub fn ordinal(self) -> usize {
        Self::ALL.iter().position(|k| *k == self).unwrap()
    }

    pub fn id(self) -> &'static str {
        match self {
            MultiValuedAttribute => "multi_valued_attribute",
            NoPrimaryKey => "no_primary_key",
            NoForeignKey => "no_foreign_key",
            GenericPrimaryKey => "generic_primary_key",
            DataInMetadata => "data_in_metadata",
            AdjacencyList => "adjacency_list",
            GodTable => "god_table",
            RoundingErrors => "rounding_errors",
            EnumeratedTypes => "enumerated_types",
            ExternalDataStorage => "external_data_storage",
            IndexOveruse => "index_overuse",
            IndexUnderuse => "index_underuse",
            CloneTable => "clone_table",
            ColumnWildcardUsage => "column_wildcard_usage",
            ConcatenateNulls => "concatenate_nulls",
            OrderingByRand => "ordering_by_rand",
            PatternMatching => "pattern_matching",
            ImplicitColumns => "implicit_columns",
            DistinctAndJoin => "distinct_and_join",
            TooManyJoins => "too_many_joins",
            MissingTimezone => "missing_timezone",
            IncorrectDataType => "incorrect_data_type",
            DenormalizedTable => "denormalized_table",
            InformationDuplication => "information_duplication",
            RedundantColumn => "redundant_column",
            NoDomainConstraint => "no_domain_constraint",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|k| k.id() == id)
    }

    pub fn category(self) -> Category {
        match self {
            MultiValuedAttribute | NoPrimaryKey | NoForeignKey | GenericPrimaryKey
            | DataInMetadata | AdjacencyList | GodTable => Category::LogicalDesign,
            RoundingErrors | EnumeratedTypes | ExternalDataStorage | IndexOveruse
            | IndexUnderuse | CloneTable => Category::PhysicalDesign,
            ColumnWildcardUsage | ConcatenateNulls | OrderingByRand | PatternMatching
            | ImplicitColumns | DistinctAndJoin | TooManyJoins => Category::Query,
            MissingTimezone | IncorrectDataType | DenormalizedTable | InformationDuplication
            | RedundantColumn | NoDomainConstraint => Category::Data,
        }
    }

    pub fn impact_flags(self) -> ImpactFlags {
        match self {
            MultiValuedAttribute => flags(true, true, Down, true, true),
            NoPrimaryKey => flags(true, true, Up, true, false),
            NoForeignKey => flags(true, true, DaDirection::None, true, false),
            GenericPrimaryKey => flags(false, true, DaDirection::None, false, false),
            DataInMetadata => flags(true, true, Down, true, true),
            AdjacencyList => flags(true, false, DaDirection::None, false, false),
            GodTable => flags(true, true, DaDirection::None, false, false),
            RoundingErrors => flags(false, false, DaDirection::None, false, true),
            EnumeratedTypes => flags(true, true, Down, false, false),
            ExternalDataStorage => flags(false, true, DaDirection::None, true, true),
            IndexOveruse => flags(true, true, Down, false, false),
            IndexUnderuse => flags(true, true, Up, false, false),
            CloneTable => flags(true, true, DaDirection::None, true, true),
            ColumnWildcardUsage => flags(true, false, DaDirection::None, false, true),
            ConcatenateNulls => flags(false, false, DaDirection::None, false, true),
            OrderingByRand => flags(true, false, DaDirection::None, false, false),
            PatternMatching => flags(true, false, DaDirection::None, false, false),
            ImplicitColumns => flags(false, true, DaDirection::None, true, false),
            DistinctAndJoin => flags(true, true, DaDirection::None, false, false),
            TooManyJoins => flags(true, false, DaDirection::None, false, false),
            MissingTimezone => flags(false, false, DaDirection::None, false, true),
            IncorrectDataType => flags(true, false, Down, false, false),
            DenormalizedTable => flags(true, false, Down, false, false),
            InformationDuplication => flags(false, true, DaDirection::None, true, true),
            RedundantColumn => flags(false, false, Down, false, false),
            NoDomainConstraint => flags(false, true, Down, true, false),
        }
    }
}
