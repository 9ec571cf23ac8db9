//! Exhaustive verification suites with line-oriented reports.
//!
//! Each check prints `CHECK <name> <instance> PASS|FAIL <details>`. Exit
//! codes: 0 all pass, 1 at least one FAIL, 3 enumeration cap exceeded.
//! Instances with more vertices than the labeling cap are spot-checked on a
//! fixed set of random labelings and the report says so.

use std::io::{self, Write};
use std::str::FromStr;

use rocrs_core::oracle::{
    check_coupling_all, check_prefix_stability, exact_offsample_expectation_all,
    for_each_labeling, verify_appendix_fig5, verify_appendix_fig6, verify_load_bounds,
    OracleError, FIG6_REFERENCE_OFF, FIG6_REFERENCE_ON, LABELING_ENUM_CAP, SAMPLE_ENUM_CAP,
};
use rocrs_core::rng::SplitMix64;
use rocrs_core::{Frac, Instance, Labeling};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Appendix,
    Coupling,
    Expectation,
    Prefix,
    LoadBounds,
    All,
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Suite, String> {
        match s {
            "appendix" => Ok(Suite::Appendix),
            "coupling" => Ok(Suite::Coupling),
            "expectation" => Ok(Suite::Expectation),
            "prefix" => Ok(Suite::Prefix),
            "load-bounds" => Ok(Suite::LoadBounds),
            "all" => Ok(Suite::All),
            other => Err(format!(
                "unknown suite '{}' (expected appendix, coupling, expectation, prefix, \
                 load-bounds, or all)",
                other
            )),
        }
    }
}

/// Collects CHECK lines and the worst exit code seen.
struct Reporter<'a, W: Write> {
    out: &'a mut W,
    exit: i32,
}

impl<'a, W: Write> Reporter<'a, W> {
    fn new(out: &'a mut W) -> Reporter<'a, W> {
        Reporter { out, exit: EXIT_OK }
    }

    fn check(
        &mut self,
        name: &str,
        instance: &str,
        pass: bool,
        details: &str,
    ) -> io::Result<()> {
        if !pass && self.exit == EXIT_OK {
            self.exit = EXIT_FAIL;
        }
        writeln!(
            self.out,
            "CHECK {} {} {} {}",
            name,
            instance,
            if pass { "PASS" } else { "FAIL" },
            details
        )
    }

    fn cap(&mut self, name: &str, instance: &str, details: &str) -> io::Result<()> {
        self.exit = EXIT_CAP;
        writeln!(self.out, "CHECK {} {} CAP {}", name, instance, details)
    }
}

/// The labelings a suite iterates: all `n!` when `n` fits the cap, otherwise
/// 24 fixed random spot checks. The flag reports which mode was used.
fn suite_labelings(n: usize) -> (Vec<Labeling>, bool) {
    if n <= LABELING_ENUM_CAP {
        let mut all = Vec::new();
        for_each_labeling(n, |labeling| all.push(labeling.clone()));
        (all, true)
    } else {
        let mut rng = SplitMix64::new(0x6c61_6265);
        let mut order: Vec<usize> = (0..n).collect();
        let spots = (0..24)
            .map(|_| {
                rng.shuffle(&mut order);
                Labeling::from_order(&order).expect("permutation")
            })
            .collect();
        (spots, false)
    }
}

fn coverage_note(exhaustive: bool, count: usize) -> String {
    if exhaustive {
        format!("all {} labelings", count)
    } else {
        format!("{} random labelings (spot check beyond the cap)", count)
    }
}

fn run_appendix<W: Write>(r: &mut Reporter<'_, W>) -> io::Result<()> {
    r.check(
        "fig5-flip",
        "fig5",
        verify_appendix_fig5(),
        "v before u without the v-u edge, u before v with the full sample, all 120 labelings",
    )?;
    let report = verify_appendix_fig6();
    r.check(
        "fig6-off-sample-counts",
        "fig6",
        report.off_counts == FIG6_REFERENCE_OFF,
        &format!(
            "fixed-vu/dependent/fixed-uv expected {}/{}/{} enumerated {}/{}/{}",
            FIG6_REFERENCE_OFF.0,
            FIG6_REFERENCE_OFF.1,
            FIG6_REFERENCE_OFF.2,
            report.off_counts.0,
            report.off_counts.1,
            report.off_counts.2,
        ),
    )?;
    r.check(
        "fig6-on-sample-counts",
        "fig6",
        report.on_counts == FIG6_REFERENCE_ON,
        &format!(
            "fixed-vu/dependent/fixed-uv expected {}/{}/{} enumerated {}/{}/{}",
            FIG6_REFERENCE_ON.0,
            FIG6_REFERENCE_ON.1,
            FIG6_REFERENCE_ON.2,
            report.on_counts.0,
            report.on_counts.1,
            report.on_counts.2,
        ),
    )?;
    r.check(
        "fig6-strict-inequality",
        "fig6",
        report.strict_for_every_labeling,
        "count(off-sample & v-before-u) > count(on-sample & v-before-u) for every labeling",
    )
}

fn run_expectation<W: Write>(
    r: &mut Reporter<'_, W>,
    name: &str,
    inst: &Instance,
) -> io::Result<()> {
    if inst.edge_count() > SAMPLE_ENUM_CAP {
        return r.cap(
            "expectation",
            name,
            &format!("{} edges exceed the enumeration cap", inst.edge_count()),
        );
    }
    let (labelings, exhaustive) = suite_labelings(inst.vertex_count());
    let mut max = Frac::ZERO;
    let mut ok = true;
    for labeling in &labelings {
        let values = exact_offsample_expectation_all(inst, labeling).expect("within cap");
        for value in values {
            if value > max {
                max = value;
            }
            if value > Frac::from_int(3) {
                ok = false;
            }
        }
    }
    r.check(
        "expectation",
        name,
        ok,
        &format!(
            "max E[x(off-sample bucket)] = {} bound 3, {}",
            max,
            coverage_note(exhaustive, labelings.len())
        ),
    )
}

fn run_coupling<W: Write>(
    r: &mut Reporter<'_, W>,
    name: &str,
    inst: &Instance,
) -> io::Result<()> {
    if inst.edge_count() > SAMPLE_ENUM_CAP {
        return r.cap(
            "coupling",
            name,
            &format!("{} edges exceed the enumeration cap", inst.edge_count()),
        );
    }
    let (labelings, exhaustive) = suite_labelings(inst.vertex_count());
    let (mut counts_ok, mut load_ok, mut lower_ok) = (true, true, true);
    for labeling in &labelings {
        for report in check_coupling_all(inst, labeling).expect("within cap") {
            counts_ok &= report.coupling_holds();
            load_ok &= report.witness_load_ok;
            lower_ok &= report.strict_lower_ok;
        }
    }
    let note = coverage_note(exhaustive, labelings.len());
    r.check(
        "coupling-counts",
        name,
        counts_ok,
        &format!("per-edge witness coupling count inequality, {}", note),
    )?;
    r.check(
        "coupling-witness-load",
        name,
        load_ok,
        &format!("witness bucket load at most 3 in every realization, {}", note),
    )?;
    r.check(
        "coupling-strict-lower",
        name,
        lower_ok,
        &format!("witness bucket load above 2 whenever the sampled load is, {}", note),
    )
}

fn run_prefix<W: Write>(
    r: &mut Reporter<'_, W>,
    name: &str,
    inst: &Instance,
) -> io::Result<()> {
    if inst.edge_count() > SAMPLE_ENUM_CAP {
        return r.cap(
            "prefix-stability",
            name,
            &format!("{} edges exceed the enumeration cap", inst.edge_count()),
        );
    }
    let (labelings, exhaustive) = suite_labelings(inst.vertex_count());
    let ok = labelings
        .iter()
        .all(|labeling| check_prefix_stability(inst, labeling).expect("within cap"));
    r.check(
        "prefix-stability",
        name,
        ok,
        &format!(
            "shared predecessors survive adding an edge to the sample, {}",
            coverage_note(exhaustive, labelings.len())
        ),
    )
}

fn run_load_bounds<W: Write>(
    r: &mut Reporter<'_, W>,
    name: &str,
    inst: &Instance,
) -> io::Result<Option<String>> {
    if inst.edge_count() > SAMPLE_ENUM_CAP {
        r.cap(
            "load-bounds",
            name,
            &format!("{} edges exceed the enumeration cap", inst.edge_count()),
        )?;
        return Ok(None);
    }
    let (labelings, exhaustive) = suite_labelings(inst.vertex_count());
    let mut ok = true;
    for labeling in &labelings {
        match verify_load_bounds(inst, labeling) {
            Ok(holds) => ok &= holds,
            Err(OracleError::PolytopeViolation) => {
                // Precondition failure, not a claim failure.
                return Ok(Some(format!(
                    "instance {}: marginals outside the forest polytope",
                    name
                )));
            }
            Err(other) => panic!("unexpected oracle error: {}", other),
        }
    }
    r.check(
        "load-bounds",
        name,
        ok,
        &format!(
            "offline and sampled-restricted bucket loads at most 2, {}",
            coverage_note(exhaustive, labelings.len())
        ),
    )?;
    Ok(None)
}

/// Runs one suite over the named instances, writing CHECK lines to `out`.
/// Returns the process exit code, or `Err` with a usage message when a
/// precondition (not a verified claim) fails.
pub fn run_suite<W: Write>(
    suite: Suite,
    instances: &[(String, Instance)],
    out: &mut W,
) -> io::Result<Result<i32, String>> {
    let mut r = Reporter::new(out);
    if matches!(suite, Suite::Appendix | Suite::All) {
        run_appendix(&mut r)?;
    }
    for (name, inst) in instances {
        if matches!(suite, Suite::Expectation | Suite::All) {
            run_expectation(&mut r, name, inst)?;
        }
        if matches!(suite, Suite::Coupling | Suite::All) {
            run_coupling(&mut r, name, inst)?;
        }
        if matches!(suite, Suite::Prefix | Suite::All) {
            run_prefix(&mut r, name, inst)?;
        }
        if matches!(suite, Suite::LoadBounds | Suite::All) {
            if let Some(usage) = run_load_bounds(&mut r, name, inst)? {
                return Ok(Err(usage));
            }
        }
    }
    Ok(Ok(r.exit))
}

/// The default instance set when no `--instance` is given.
pub fn default_instances() -> Vec<(String, Instance)> {
    vec![
        ("fig5".to_string(), crate::gen::fig5()),
        ("fig6".to_string(), crate::gen::fig6()),
    ]
}
