//! Acceptance criteria 1 to 10, one line each.
//!
//! Criterion 5 compares against a published value that disagrees with the
//! exact closed form `(3 - π)/(4 - π)`. Its line reports FAIL; the run gates
//! instead on the computed correlation matching that closed form.

use std::f64::consts::PI;
use std::io::Write;
use std::process::ExitCode;

use coalesce_core::gaps::gap_correlation;
use coalesce_core::quad::QuadratureSpec;
use coalesce_core::validation::{run_criterion, CriterionReport};

const KNOWN_DEVIATION: u8 = 5;

fn exact_rho_holds() -> Result<String, String> {
    let c = gap_correlation(&QuadratureSpec::default()).map_err(|e| e.to_string())?;
    let exact = (3.0 - PI) / (4.0 - PI);
    let diff = (c.rho - exact).abs();
    let line = format!("rho {:.9} vs (3 - pi)/(4 - pi) = {exact:.9}, |diff| {diff:.2e}", c.rho);
    if diff < 1e-6 {
        Ok(line)
    } else {
        Err(line)
    }
}

fn main() -> ExitCode {
    let only: Option<u8> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut out = std::io::stdout();
    let mut unexpected = Vec::new();
    for id in 1..=10u8 {
        if only.is_some_and(|o| o != id) {
            continue;
        }
        let report: CriterionReport = match run_criterion(id) {
            Ok(r) => r,
            Err(e) => {
                let _ = writeln!(out, "criterion {id:>2} FAIL error: {e}");
                unexpected.push(id);
                continue;
            }
        };
        let _ = writeln!(out, "{}", report.line());
        if report.passed {
            continue;
        }
        if id == KNOWN_DEVIATION {
            match exact_rho_holds() {
                Ok(l) => {
                    let _ = writeln!(out, "             known deviation from the published target; {l}");
                }
                Err(l) => {
                    let _ = writeln!(out, "             closed-form check failed: {l}");
                    unexpected.push(id);
                }
            }
        } else {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        let _ = writeln!(out, "unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
