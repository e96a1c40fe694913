//! `list`: the model catalogue as a text table.

use std::fmt::Write as _;

use algflow::catalog::ModelId;

pub fn table(pairs: bool, rational_only: bool) -> String {
    let mut out = String::new();
    let _ = write!(out, "{:<6} {:<6}", "model", "family");
    if pairs {
        let _ = write!(out, " {:<5}", "pair");
    }
    let _ = writeln!(out, " {:<10} params", "class");
    for id in ModelId::ALL.into_iter().filter(|id| !rational_only || id.is_rational()) {
        let _ = write!(out, "{:<6} A{:<5}", id.name(), id.family());
        if pairs {
            let _ = write!(out, " {:<5}", id.pair().to_string());
        }
        let class = if id.is_rational() { "rational" } else { "polynomial" };
        let names: Vec<&str> = id.params().iter().map(|p| p.name()).collect();
        let _ = writeln!(out, " {class:<10} {}", names.join(","));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(s: &str) -> Vec<&str> {
        s.lines().skip(1).collect()
    }

    #[test]
    fn eleven_rows() {
        assert_eq!(rows(&table(false, false)).len(), 11);
    }

    #[test]
    fn pairs_column() {
        let t = table(true, false);
        let a11 = rows(&t).into_iter().find(|r| r.starts_with("A1_1")).unwrap();
        assert!(a11.contains("Y12"), "{a11}");
    }

    #[test]
    fn rational_filter() {
        let t = table(false, true);
        let ids: Vec<&str> = rows(&t).iter().map(|r| r.split_whitespace().next().unwrap()).collect();
        assert_eq!(ids, ["A2_3", "A3_2"]);
    }
}
