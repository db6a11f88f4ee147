//! Synthetic workload generation shared by the benchmarks.

/// A corpus of `tables` CREATE TABLEs and `queries` SELECTs touching them,
/// seasoned with a few anti-patterns so detection has work to do.
pub fn synthetic_corpus(tables: usize, queries: usize) -> String {
    let mut out = String::new();
    for t in 0..tables {
        out.push_str(&format!(
            "CREATE TABLE tab{t} (tab{t}_id INTEGER PRIMARY KEY, name VARCHAR(50), \
             price FLOAT, tag_ids VARCHAR(200), ref_id INTEGER REFERENCES tab{}(tab{}_id));\n",
            (t + 1) % tables.max(1),
            (t + 1) % tables.max(1),
        ));
    }
    for q in 0..queries {
        let t = q % tables.max(1);
        match q % 4 {
            0 => out.push_str(&format!(
                "SELECT * FROM tab{t} WHERE name LIKE '%x{q}%';\n"
            )),
            1 => out.push_str(&format!(
                "SELECT DISTINCT a.name FROM tab{t} a JOIN tab{} b ON a.ref_id = b.tab{}_id;\n",
                (t + 1) % tables.max(1),
                (t + 1) % tables.max(1),
            )),
            2 => out.push_str(&format!(
                "SELECT name FROM tab{t} WHERE tag_ids LIKE '[[:<:]]v{q}[[:>:]]';\n"
            )),
            _ => out.push_str(&format!("INSERT INTO tab{t} VALUES ({q}, 'n', 1.5, 'a,b', 0);\n")),
        }
    }
    out
}
