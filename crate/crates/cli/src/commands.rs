use std::fmt::Write as _;

use qinstr::accinfo::{accessible_info, DEFAULT_TOL};
use qinstr::bounds::{
    full_report, groenewold_lindblad_check, holevo, identity_suite, subentropy_bound, BoundsReport, BOUND_SLACK,
};
use qinstr::entropy::{hybrid_rel_entropy, q_rel_entropy};
use qinstr::instrument::{a_priori, channel_lambda_i};
use qinstr::scenarios::{builtin, random_instrument, random_scenario, random_state, rng_for, Scenario};

use crate::format::num;
use crate::{CliError, Output};

pub const SWEEP_HEADER: &str = "x,I_c,B_Hlv,B_SWW,B_Hall,B_nub,b_nlb,b_Scu,b_subent,b1,b2";

/// Largest identity residual counted as a pass.
const IDENTITY_TOL: f64 = 1e-9;

fn describe(s: &Scenario) -> String {
    let params: Vec<String> = s.parameters.iter().map(|(k, v)| format!("{k} = {}", num(*v))).collect();
    let mut line = format!("scenario {}", s.label);
    if !params.is_empty() {
        line.push_str(&format!(" ({})", params.join(", ")));
    }
    line
}

pub fn bounds(s: &Scenario) -> Result<Output, CliError> {
    let r = full_report(&s.ensemble, &s.instrument)?;
    let mut text = String::new();
    writeln!(text, "{}", describe(s)).unwrap();
    writeln!(
        text,
        "dimension {}, letters {}, outcomes {}",
        s.dim(),
        s.ensemble.len(),
        s.instrument.n_outcomes()
    )
    .unwrap();
    let opt = |v: Option<f64>| v.map_or_else(|| "unavailable".to_string(), num);
    let rows: [(&str, String); 12] = [
        ("I_c", num(r.i_c)),
        ("B_Hlv", num(r.b_hlv)),
        ("B_SWW", num(r.b_sww)),
        ("B_SWW symmetric form", num(r.b_sww_symmetric)),
        ("B_Hall", opt(r.b_hall())),
        ("B_nub", opt(r.b_nub())),
        ("b_nlb", opt(r.b_nlb())),
        ("b_Scu", opt(r.b_scu())),
        ("b_subent", num(r.b_subent)),
        ("b1", num(r.b1)),
        ("b2", opt(r.b2())),
        ("I_q(eta_i)", num(r.iq_eta)),
    ];
    for (name, value) in rows {
        writeln!(text, "  {name:<22}{value}").unwrap();
    }
    if let Some(reason) = &r.hall_unavailable {
        writeln!(text, "dual-instrument bounds unavailable: {reason}").unwrap();
    }
    if !r.completed_outcomes.is_empty() {
        writeln!(text, "never-occurring outcomes (completed states): {}", r.completed_outcomes.join(", ")).unwrap();
    }
    writeln!(text, "invariants").unwrap();
    for c in r.invariants() {
        let status = if c.passed() { "PASS" } else { "FAIL" };
        writeln!(text, "  {status}  {:<22}slack {}", c.name, num(c.slack)).unwrap();
    }
    Ok(Output { text, passed: r.all_pass() })
}

/// Grid `from, from + step, ...` with `round((to - from) / step) + 1` points.
pub fn sweep_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(from.is_finite() && to.is_finite() && step.is_finite()) {
        return Err(CliError::Usage("sweep bounds and step must be finite".into()));
    }
    if step <= 0.0 {
        return Err(CliError::Usage(format!("step must be positive, got {step}")));
    }
    if from > to {
        return Err(CliError::Usage(format!("--from {from} exceeds --to {to}")));
    }
    let n = ((to - from) / step).round() as usize + 1;
    Ok((0..n).map(|k| from + k as f64 * step).collect())
}

fn sweep_row(x: f64, r: &BoundsReport) -> String {
    let opt = |v: Option<f64>| v.map_or_else(|| "nan".to_string(), num);
    [
        num(x),
        num(r.i_c),
        num(r.b_hlv),
        num(r.b_sww),
        opt(r.b_hall()),
        opt(r.b_nub()),
        opt(r.b_nlb()),
        opt(r.b_scu()),
        num(r.b_subent),
        num(r.b1),
        opt(r.b2()),
    ]
    .join(",")
}

pub fn sweep(name: &str, from: f64, to: f64, step: f64) -> Result<String, CliError> {
    let grid = sweep_grid(from, to, step)?;
    if from < 0.0 {
        return Err(CliError::Usage(format!("x must be >= 0, got --from {from}")));
    }
    // reject unknown names before any work
    builtin(name, from).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut csv = String::from(SWEEP_HEADER);
    csv.push('\n');
    for x in grid {
        let s = builtin(name, x)?;
        csv.push_str(&sweep_row(x, &full_report(&s.ensemble, &s.instrument)?));
        csv.push('\n');
    }
    Ok(csv)
}

struct Suite {
    name: &'static str,
    checks: usize,
    violations: usize,
    worst: f64,
    worst_label: &'static str,
}

impl Suite {
    fn new(name: &'static str, worst_label: &'static str) -> Self {
        Suite { name, checks: 0, violations: 0, worst: f64::INFINITY, worst_label }
    }

    /// Record a slack that must be at least `-tol`.
    fn slack(&mut self, slack: f64, tol: f64) {
        self.checks += 1;
        self.worst = self.worst.min(slack);
        if !(slack >= -tol) {
            self.violations += 1;
        }
    }
}

fn trial_seed(seed: u64, t: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(t as u64)
}

/// Runs the invariant suites on `trials` random scenarios.
pub fn verify(seed: u64, trials: usize) -> Result<Output, CliError> {
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let mut chain = Suite::new("ordering chain", "worst slack");
    let mut identities = Suite::new("identities", "worst slack");
    let mut monotonicity = Suite::new("relative entropy monotonicity", "worst slack");
    let mut gain = Suite::new("information gain", "worst slack");

    for t in 0..trials {
        let sub = trial_seed(seed, t);
        let d = 2 + t % 2;
        let s = random_scenario(sub, d, 2 + t / 2 % 3, 2 + t / 6 % 3, 1 + t / 18 % 2)?;

        let r = full_report(&s.ensemble, &s.instrument)?;
        for c in r.invariants() {
            chain.slack(c.slack, BOUND_SLACK);
        }
        for c in identity_suite(&s.ensemble, &s.instrument)? {
            identities.slack(-c.residual(), IDENTITY_TOL);
        }

        let mut rng = rng_for(sub, 1);
        let r1 = random_state(&mut rng, d);
        let r2 = random_state(&mut rng, d);
        let before = q_rel_entropy(&r1, &r2)?.value();
        let after = q_rel_entropy(&a_priori(&s.instrument, &r1)?, &a_priori(&s.instrument, &r2)?)?.value();
        monotonicity.slack(before - after, BOUND_SLACK);
        let hybrid = hybrid_rel_entropy(
            &channel_lambda_i(&s.instrument, &r1)?,
            &channel_lambda_i(&s.instrument, &r2)?,
        )?
        .value();
        monotonicity.slack(before - hybrid, BOUND_SLACK);

        let inst = random_instrument(&mut rng, d, 2 + t % 3, 1 + t % 2);
        let g = groenewold_lindblad_check(&inst, 10, sub)?;
        gain.slack(g.min_chain_slack, BOUND_SLACK);
        gain.slack(g.min_ic, BOUND_SLACK);
        if let Some(m) = g.min_gain_mixed {
            gain.slack(m, BOUND_SLACK);
        }
    }

    let suites = [chain, identities, monotonicity, gain];
    let mut text = format!("seed {seed}, trials {trials}\n");
    for s in &suites {
        let status = if s.violations == 0 { "PASS" } else { "FAIL" };
        writeln!(
            text,
            "{status}  {:<32}{} checks, {} violations, {} {}",
            s.name,
            s.checks,
            s.violations,
            s.worst_label,
            num(s.worst)
        )
        .unwrap();
    }
    Ok(Output { passed: suites.iter().all(|s| s.violations == 0), text })
}

pub fn accinfo(s: &Scenario, outcomes: Option<usize>, restarts: usize, seed: u64) -> Result<Output, CliError> {
    let e = &s.ensemble;
    let r = accessible_info(e, outcomes, restarts, seed, DEFAULT_TOL).map_err(|err| match err {
        qinstr::Error::InvalidArgument(m) => CliError::Usage(m),
        other => CliError::Core(other),
    })?;
    let (lo, hi) = (subentropy_bound(e), holevo(e));
    let mut text = String::new();
    writeln!(text, "{}", describe(s)).unwrap();
    writeln!(text, "accessible information  {}", num(r.value)).unwrap();
    writeln!(text, "bracket [b_subent, B_Hlv]  [{}, {}]", num(lo), num(hi)).unwrap();
    writeln!(text, "best start  {}", r.origin).unwrap();
    writeln!(text, "POVM with {} elements", r.povm.len()).unwrap();
    for (label, el) in r.povm.labels().iter().zip(r.povm.elements()) {
        writeln!(text, "  E({label})").unwrap();
        for row in el.matrix().rows() {
            let cells: Vec<String> = row.iter().map(|z| format!("[{}, {}]", num(z.re), num(z.im))).collect();
            writeln!(text, "    {}", cells.join("  ")).unwrap();
        }
    }
    let passed = r.value >= lo - BOUND_SLACK && r.value <= hi + BOUND_SLACK;
    Ok(Output { text, passed })
}
