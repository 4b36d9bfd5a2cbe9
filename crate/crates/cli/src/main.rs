//! `theta`: command-line scenarios over the exact-arithmetic engine.
//!
//! Subcommands: `log-check` (Rezk logarithm valuation + oracle), `hensel`
//! (unit-root solve with self-verification), `collapse` (relation
//! saturation to a fixpoint), `check-presentation` (content invariants),
//! and `tables` (z-power reductions and window matrices). Output is
//! human-readable text by default; `--json` switches to a machine format
//! with the same fields. Exit code 0 means the scenario's assertions hold,
//! 1 means they fail, 2 means the invocation itself was invalid.

mod expr;

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;
use theta_engine::padic::{
    classical_log, eq_at_common_precision, hensel_unit_root, rezk_log, verify_unit_root,
    PAdicInt, Valuation,
};
use theta_engine::powerops::check_presentation;
use theta_engine::rings::{CoeffElem, ETheoryPresentation, HEIGHT1_SRC, HEIGHT2_SRC};
use theta_engine::saturate::{saturate, verify_fixpoint, SaturationLimits, SaturationReport};
use theta_engine::ExecMode;

#[derive(Parser)]
#[command(
    name = "theta",
    version,
    about = "Exact arithmetic scenarios: p-adic logarithms, Hensel lifting, power-operation tables, and relation saturation."
)]
struct Cli {
    /// Emit a machine-readable JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the Rezk logarithm of 1 + p^n and verify its valuation,
    /// leading term, and agreement with the classical logarithm.
    LogCheck {
        /// Odd prime p.
        #[arg(short = 'p', long)]
        prime: u64,
        /// Exponent n in x = 1 + p^n (requires 1 <= n < precision).
        #[arg(short)]
        n: u32,
        /// Working precision: arithmetic is mod p^precision.
        #[arg(long, default_value_t = 12)]
        precision: u32,
    },
    /// Solve (1 + p c)^(p^(k-1)) = 1 + b p^k mod p^n for c, then verify
    /// the congruence by modular exponentiation.
    Hensel {
        /// Odd prime p.
        #[arg(short = 'p', long)]
        prime: u64,
        /// Depth k >= 1; the solution c is determined mod p^(n-k).
        #[arg(short)]
        k: u32,
        /// Unit b (not divisible by p).
        #[arg(short, allow_negative_numbers = true)]
        b: i64,
        /// Working precision n (requires n > k).
        #[arg(long, default_value_t = 12)]
        precision: u32,
    },
    /// Saturate an ideal of coefficient-ring relations under the
    /// power-operation rule and report the fixpoint.
    Collapse {
        /// Presentation: `height1`, `height2`, or a TOML file path.
        #[arg(long, default_value = "height2")]
        etheory: String,
        /// Initial relations, comma-separated expressions in `a`
        /// (e.g. `4` or `2a^2, a^6`).
        #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true)]
        relations: Vec<String>,
        /// Largest symmetric-power level applied per pass (even, >= 2);
        /// levels 2, 4, ..., loop-level run in ascending order.
        #[arg(long, default_value_t = 12)]
        loop_level: u32,
        /// Override the ring precision N (residues mod p^N).
        #[arg(long)]
        precision: Option<u32>,
        /// Override the nilpotence order K (a^K = 0).
        #[arg(long)]
        truncation: Option<usize>,
        /// Stop after this many passes even without a fixpoint.
        #[arg(long, default_value_t = 64)]
        max_passes: u32,
        /// Abort if the ideal accumulates more generators than this.
        #[arg(long, default_value_t = 4096)]
        max_generators: usize,
        /// Also feed a-multiples and pairwise products of generators to
        /// the rule (bounded exploration beyond the generator strategy).
        #[arg(long)]
        exhaustive: bool,
        /// Force the sequential engine (default: data-parallel when the
        /// `parallel` feature is compiled in; results are identical).
        #[arg(long)]
        serial: bool,
    },
    /// Verify the content-level invariants of a presentation: z = 0
    /// behavior, transfer idempotence, window composition, and the
    /// power-operation axioms on random inputs.
    CheckPresentation {
        /// Presentation: `height1`, `height2`, or a TOML file path.
        #[arg(long, default_value = "height2")]
        etheory: String,
        /// Override the ring precision N.
        #[arg(long)]
        precision: Option<u32>,
        /// Override the nilpotence order K.
        #[arg(long)]
        truncation: Option<usize>,
    },
    /// Print the z-power reduction table and window matrices.
    Tables {
        /// Presentation: `height1`, `height2`, or a TOML file path.
        #[arg(long, default_value = "height2")]
        etheory: String,
        /// Largest z-power to reduce (default: 2 deg f + 1).
        #[arg(long)]
        max_power: Option<usize>,
        /// Window-matrix shifts to print, comma-separated.
        #[arg(long, value_delimiter = ',', default_values_t = [1u32, 2, 3, 6])]
        shifts: Vec<u32>,
        /// Override the ring precision N.
        #[arg(long)]
        precision: Option<u32>,
        /// Override the nilpotence order K.
        #[arg(long)]
        truncation: Option<usize>,
    },
}

/// An invalid invocation (exit code 2). Scenario failures are not errors:
/// handlers report them and return `false` (exit code 1).
struct UsageError(String);

type Handled = Result<bool, UsageError>;

fn usage<T>(msg: impl Into<String>) -> Result<T, UsageError> {
    Err(UsageError(msg.into()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    let result = match cli.command {
        Command::LogCheck { prime, n, precision } => log_check(prime, n, precision, json),
        Command::Hensel { prime, k, b, precision } => hensel(prime, k, b, precision, json),
        Command::Collapse {
            etheory,
            relations,
            loop_level,
            precision,
            truncation,
            max_passes,
            max_generators,
            exhaustive,
            serial,
        } => collapse(
            &etheory,
            &relations,
            loop_level,
            precision,
            truncation,
            SaturationLimits { max_passes, max_generators },
            exhaustive,
            serial,
            json,
        ),
        Command::CheckPresentation { etheory, precision, truncation } => {
            check_pres(&etheory, precision, truncation, json)
        }
        Command::Tables { etheory, max_power, shifts, precision, truncation } => {
            tables(&etheory, max_power, &shifts, precision, truncation, json)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Resolve a presentation argument: an existing file path wins, then the
/// built-in names (with or without a `.pres` suffix).
fn load_presentation(
    name: &str,
    precision: Option<u32>,
    truncation: Option<usize>,
) -> Result<ETheoryPresentation, UsageError> {
    let src = if Path::new(name).is_file() {
        fs::read_to_string(name)
            .map_err(|e| UsageError(format!("cannot read presentation file `{name}`: {e}")))?
    } else {
        match name {
            "height1" | "height1.pres" => HEIGHT1_SRC.to_string(),
            "height2" | "height2.pres" => HEIGHT2_SRC.to_string(),
            _ => {
                return usage(format!(
                    "unknown presentation `{name}`: not a file, and not one of the \
                     built-ins `height1`, `height2`"
                ))
            }
        }
    };
    ETheoryPresentation::from_toml_str(&src, precision, truncation)
        .map_err(|e| UsageError(format!("invalid presentation `{name}`: {e}")))
}

fn modulus_str(p: u64, precision: u32) -> String {
    format!("{p}^{precision} = {}", (p as u128).pow(precision))
}

fn padic_str(x: PAdicInt) -> String {
    format!("{} (mod {})", x.residue(), modulus_str(x.prime(), x.precision()))
}

fn padic_json(x: PAdicInt) -> serde_json::Value {
    json!({
        "residue": x.residue() as u64,
        "precision": x.precision(),
        "modulus": x.modulus() as u64,
    })
}

fn status_line(pass: bool) -> &'static str {
    if pass {
        "status: pass"
    } else {
        "status: FAIL"
    }
}

fn log_check(p: u64, n: u32, precision: u32, json_out: bool) -> Handled {
    if p == 2 {
        return usage("log-check requires an odd prime (the logarithm's series needs p > 2)");
    }
    if n == 0 {
        return usage("n must be at least 1");
    }
    if precision < n + 1 {
        return usage(format!("precision must be at least n + 1 = {}", n + 1));
    }
    let pn = (p as i128)
        .checked_pow(n)
        .ok_or_else(|| UsageError(format!("{p}^{n} overflows")))?;
    let x = PAdicInt::new(p, 1 + pn, precision).map_err(|e| UsageError(e.to_string()))?;
    let lg = rezk_log(x).map_err(|e| UsageError(e.to_string()))?;

    // Claim 1: the valuation of log(1 + p^n) is exactly n - 1.
    let val_ok = lg.val() == Valuation::Known(n - 1);
    // Claim 2: the leading term is -p^(n-1), i.e. log x = -p^(n-1) mod p^n.
    let expect = PAdicInt::new(p, -(p as i128).pow(n - 1), n).unwrap();
    let leading_ok = lg.reduce_to(n).residue() == expect.residue();
    // Claim 3 (independent oracle): p log x = (p - 1) classical-log x.
    let cl = classical_log(x).map_err(|e| UsageError(e.to_string()))?;
    let p_scalar = PAdicInt::new(p, p as i128, precision).unwrap();
    let p1_scalar = PAdicInt::new(p, p as i128 - 1, precision).unwrap();
    let oracle_ok = eq_at_common_precision(lg.mul(p_scalar), cl.mul(p1_scalar));
    let pass = val_ok && leading_ok && oracle_ok;

    if json_out {
        let report = json!({
            "command": "log-check",
            "prime": p,
            "n": n,
            "precision": precision,
            "x": padic_json(x),
            "log": padic_json(lg),
            "valuation": n - 1,
            "valuation_ok": val_ok,
            "leading_term": padic_json(expect),
            "leading_term_ok": leading_ok,
            "classical_oracle_ok": oracle_ok,
            "pass": pass,
        });
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
    } else {
        println!("Rezk logarithm at p = {p}, n = {n}, precision {precision}");
        println!("  x     = 1 + {p}^{n} = {}", padic_str(x));
        println!("  log x = {}", padic_str(lg));
        println!(
            "  valuation: {} (expected n - 1 = {}) -> {}",
            lg.val(),
            n - 1,
            if val_ok { "ok" } else { "MISMATCH" }
        );
        println!(
            "  leading term: log x = {} (expected -{p}^{} = {}) -> {}",
            padic_str(lg.reduce_to(n)),
            n - 1,
            padic_str(expect),
            if leading_ok { "ok" } else { "MISMATCH" }
        );
        println!(
            "  oracle: p log x = (p - 1) classical-log x at common precision -> {}",
            if oracle_ok { "ok" } else { "MISMATCH" }
        );
        println!("{}", status_line(pass));
    }
    Ok(pass)
}

fn hensel(p: u64, k: u32, b: i64, precision: u32, json_out: bool) -> Handled {
    if k == 0 {
        return usage("k must be at least 1");
    }
    if precision <= k {
        return usage(format!("precision must exceed k = {k} (c is determined mod p^(n-k))"));
    }
    let b = PAdicInt::new(p, b as i128, precision).map_err(|e| UsageError(e.to_string()))?;
    let c = hensel_unit_root(p, k, b, precision).map_err(|e| UsageError(e.to_string()))?;
    let verified = verify_unit_root(p, k, b, c, precision);

    // Recompute both sides of the congruence mod p^n for display.
    let one = PAdicInt::new(p, 1, precision).unwrap();
    let pk = PAdicInt::new(p, (p as i128).pow(k), precision).unwrap();
    let rhs = one.add(b.mul(pk));
    let c_lift = PAdicInt::new(p, c.residue() as i128, precision).unwrap();
    let p_scalar = PAdicInt::new(p, p as i128, precision).unwrap();
    let lhs = one.add(p_scalar.mul(c_lift)).pow_mod((p as u128).pow(k - 1));

    if json_out {
        let report = json!({
            "command": "hensel",
            "prime": p,
            "k": k,
            "precision": precision,
            "b": padic_json(b),
            "c": padic_json(c),
            "lhs": padic_json(lhs),
            "rhs": padic_json(rhs),
            "verified": verified,
            "pass": verified,
        });
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
    } else {
        println!("Hensel unit-root solve at p = {p}, k = {k}, precision {precision}");
        println!("  b = {}", padic_str(b));
        println!("  c = {}", padic_str(c));
        println!(
            "  check: (1 + {p} c)^({p}^{}) = {} and 1 + b {p}^{k} = {}",
            k - 1,
            padic_str(lhs),
            padic_str(rhs)
        );
        println!("  verified: {verified}");
        println!("{}", status_line(verified));
    }
    Ok(verified)
}

fn ring_str(pres: &ETheoryPresentation) -> String {
    let s = pres.spec();
    if s.truncation() == 1 {
        format!("Z/{} (mod {})", s.modulus(), modulus_str(s.prime(), s.precision()))
    } else {
        format!(
            "Z/{}[a]/(a^{}) (residues mod {})",
            s.modulus(),
            s.truncation(),
            modulus_str(s.prime(), s.precision())
        )
    }
}

fn elems_str(gens: &[CoeffElem]) -> String {
    let parts: Vec<String> = gens.iter().map(|g| g.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn content_gate(pres: &ETheoryPresentation) -> Vec<&'static str> {
    let fl = pres.flags();
    let mut bad = Vec::new();
    if !fl.f_constant_term_zero {
        bad.push("f(0) = 0");
    }
    if !fl.tr1_at_zero_is_two {
        bad.push("tr(1) = 2 at z = 0");
    }
    if !fl.p_of_a_at_zero_is_a_squared {
        bad.push("P(a) = a^2 at z = 0");
    }
    bad
}

#[allow(clippy::too_many_arguments)]
fn collapse(
    etheory: &str,
    relations: &[String],
    loop_level: u32,
    precision: Option<u32>,
    truncation: Option<usize>,
    limits: SaturationLimits,
    exhaustive: bool,
    serial: bool,
    json_out: bool,
) -> Handled {
    if loop_level < 2 || loop_level % 2 != 0 {
        return usage("loop-level must be an even number >= 2");
    }
    if loop_level > 10_000 {
        return usage("loop-level is capped at 10000");
    }
    let pres = load_presentation(etheory, precision, truncation)?;

    // The saturation rule is only sound over a presentation whose z = 0
    // content is intact; refuse to run on one that fails the gate.
    let bad = content_gate(&pres);
    if !bad.is_empty() {
        if json_out {
            let report = json!({
                "command": "collapse",
                "etheory": etheory,
                "content_failures": bad,
                "pass": false,
            });
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
        } else {
            println!("presentation `{etheory}` fails content invariants: {}", bad.join("; "));
            println!("run `check-presentation --etheory {etheory}` for details");
            println!("{}", status_line(false));
        }
        return Ok(false);
    }

    let spec = pres.spec();
    let mut initial = Vec::new();
    for r in relations {
        let e = expr::parse_relation(r, spec)
            .map_err(|msg| UsageError(format!("relation `{r}`: {msg}")))?;
        initial.push(e);
    }
    let mode = if serial { ExecMode::Serial } else { ExecMode::Parallel };
    let report = saturate(&pres, &initial, loop_level, limits, mode, exhaustive);
    let verified =
        report.fixpoint_reached && verify_fixpoint(&pres, &report.final_generators, loop_level);
    let pass = verified;

    if json_out {
        let out = json!({
            "command": "collapse",
            "etheory": etheory,
            "mode": if serial { "serial" } else { "parallel" },
            "report": serde_json::to_value(&report).unwrap(),
            "verified_fixpoint": verified,
            "pass": pass,
        });
        println!("{}", serde_json::to_string_pretty(&out).unwrap());
    } else {
        print_collapse_text(etheory, &pres, &report, verified);
    }
    Ok(pass)
}

fn print_collapse_text(
    etheory: &str,
    pres: &ETheoryPresentation,
    report: &SaturationReport,
    verified: bool,
) {
    println!(
        "relation saturation: `{etheory}` (height {}, degree {}), coefficients in {}",
        report.height,
        pres.degree(),
        ring_str(pres)
    );
    println!("  initial ideal: {}", elems_str(&report.initial_generators));
    println!(
        "  loop level: {} (window shifts 1..{}){}",
        report.loop_level,
        report.loop_level / 2,
        if report.exhaustive { ", exhaustive sources" } else { "" }
    );
    for t in &report.trace {
        let syz: Vec<String> = t.syzygy.iter().map(|c| c.to_string()).collect();
        println!(
            "  pass {}, level {:>2}: source {}, syzygy [{}] forces {}; inserted {}",
            t.pass,
            t.level,
            t.source,
            syz.join(", "),
            t.raw,
            t.reduced
        );
    }
    println!("  passes: {}", report.passes);
    println!("  final generators: {}", elems_str(&report.final_generators));
    if report.trivial {
        println!("  trivial: true (the ideal is the unit ideal; the quotient ring is zero)");
    } else {
        println!("  trivial: false (the ideal stays proper)");
    }
    if report.fixpoint_reached {
        println!(
            "  fixpoint: reached, re-verification {}",
            if verified { "ok" } else { "FAILED" }
        );
    } else {
        println!("  fixpoint: NOT reached (limits hit: passes or generator cap)");
    }
    println!("{}", status_line(verified));
}

fn check_pres(
    etheory: &str,
    precision: Option<u32>,
    truncation: Option<usize>,
    json_out: bool,
) -> Handled {
    let pres = load_presentation(etheory, precision, truncation)?;
    let report = check_presentation(&pres);
    if json_out {
        let out = json!({
            "command": "check-presentation",
            "etheory": etheory,
            "report": serde_json::to_value(&report).unwrap(),
            "pass": report.all_pass,
        });
        println!("{}", serde_json::to_string_pretty(&out).unwrap());
    } else {
        println!(
            "presentation `{etheory}`: p = {}, height {}, N = {} (mod {}), K = {}",
            report.prime,
            report.height,
            report.precision,
            modulus_str(report.prime, report.precision),
            report.truncation
        );
        for c in &report.checks {
            println!(
                "  [{}] {}: {}",
                if c.pass { "ok " } else { "FAIL" },
                c.name,
                c.detail
            );
        }
        println!("{}", status_line(report.all_pass));
    }
    Ok(report.all_pass)
}

fn tables(
    etheory: &str,
    max_power: Option<usize>,
    shifts: &[u32],
    precision: Option<u32>,
    truncation: Option<usize>,
    json_out: bool,
) -> Handled {
    let pres = load_presentation(etheory, precision, truncation)?;
    let d = pres.degree();
    let hi = max_power.unwrap_or(2 * d + 1);
    if hi < d {
        return usage(format!("max-power must be at least deg f = {d}"));
    }
    if hi > 10_000 {
        return usage("max-power is capped at 10000");
    }
    if shifts.iter().any(|&m| m > 10_000) {
        return usage("shifts are capped at 10000");
    }

    if json_out {
        let reductions: Vec<serde_json::Value> = (d..=hi)
            .map(|k| json!({"power": k, "value": pres.reduce_z_power(k).to_string()}))
            .collect();
        let matrices: Vec<serde_json::Value> = shifts
            .iter()
            .map(|&m| {
                let w = pres.window_matrix(m);
                let rows: Vec<Vec<String>> = (0..w.size())
                    .map(|i| w.row(i).iter().map(|c| c.to_string()).collect())
                    .collect();
                json!({"shift": m, "rows": rows})
            })
            .collect();
        let out = json!({
            "command": "tables",
            "etheory": etheory,
            "prime": pres.spec().prime(),
            "height": pres.height(),
            "precision": pres.spec().precision(),
            "modulus": pres.spec().modulus(),
            "truncation": pres.spec().truncation(),
            "degree": d,
            "reductions": reductions,
            "window_matrices": matrices,
            "pass": true,
        });
        println!("{}", serde_json::to_string_pretty(&out).unwrap());
    } else {
        println!(
            "z-power reductions for `{etheory}` (degree {d}), coefficients in {}",
            ring_str(&pres)
        );
        for k in d..=hi {
            println!("  z^{k} = {}", pres.reduce_z_power(k));
        }
        println!(
            "window matrices (entry (i, j): coefficient of z^(i+1) in the reduction of z^(j+1+m))"
        );
        for &m in shifts {
            let w = pres.window_matrix(m);
            println!("  M({m}):");
            for i in 0..w.size() {
                let row: Vec<String> = w.row(i).iter().map(|c| c.to_string()).collect();
                println!("    [{}]", row.join(", "));
            }
        }
        println!("{}", status_line(true));
    }
    Ok(true)
}
