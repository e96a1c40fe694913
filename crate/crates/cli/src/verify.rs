//! `verify`: symbolic certification report.

use std::fmt::Write as _;
use std::path::Path;

use algflow::symbolic::certify::{verify_all, verify_model, verify_twin_models, CertificationReport, REPORT_VERSION};
use anyhow::Context;

use crate::input;

pub fn report(model: Option<&str>, all: bool) -> anyhow::Result<CertificationReport> {
    if all {
        return Ok(verify_all());
    }
    let id = input::model(model.ok_or_else(|| input::usage("give --model <id> or --all"))?)?;
    // a twin model also gets its identity entry
    let identities = verify_twin_models().into_iter().filter(|i| i.left == id || i.right == id).collect();
    Ok(CertificationReport { models: vec![verify_model(id)], identities })
}

fn summary(r: &CertificationReport) -> String {
    let mut out = String::new();
    for m in &r.models {
        let _ = writeln!(out, "{} {}", m.id, m.status.as_str());
    }
    for i in &r.identities {
        let _ = writeln!(out, "{}={} {}", i.left, i.right, if i.pass { "PASS" } else { "FAIL" });
    }
    out
}

pub fn run(model: Option<&str>, all: bool, out: Option<&Path>) -> anyhow::Result<bool> {
    let r = report(model, all)?;
    match out {
        Some(path) => {
            std::fs::write(path, r.to_string()).with_context(|| format!("writing {}", path.display()))?;
            print!("{}", summary(&r));
            println!("{REPORT_VERSION} report written to {}", path.display());
        }
        None => print!("{r}"),
    }
    Ok(r.all_acceptable())
}
