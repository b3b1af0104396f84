//! Command-line front end: curve data, lattice constants, operator words
//! on cusp expansions, Kloosterman/Poincare numerics, dimension-formula
//! evaluation, and the verification suites.

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;

use weiermock::context::LevelData;
use weiermock::curves::{divisors, l_value_at_1, newform_coefficients, EllipticCurveModel};
use weiermock::dimformula::{
    assemble_character, dim_formula_composite, dim_formula_prime_symbolic, DimensionTable,
};
use weiermock::heckealg::{zhat_cusp_data, OperatorWord};
use weiermock::kloosterman::{kloosterman_sum, poincare_coefficient};
use weiermock::lattice::{completed_zeta_eval, compute_periods};
use weiermock::mockform::constant_c_e;
use weiermock::verify::run_suite;

#[derive(Parser)]
#[command(
    name = "weiermock",
    about = "Weierstrass mock modular forms on genus-one modular curves",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Curve model, newform coefficients, Atkin-Lehner signs, L(E,1).
    Curve {
        #[arg(long)]
        level: u32,
        /// Emit a machine-readable record instead of text.
        #[arg(long)]
        json: bool,
        /// How many newform coefficients to print.
        #[arg(long, default_value_t = 30)]
        coeffs: usize,
    },
    /// Period lattice, quasi-periods, completion constants, and the
    /// special value zeta_hat(Lambda; L(E,1)).
    ZetaValue {
        #[arg(long)]
        level: u32,
        #[arg(long)]
        json: bool,
    },
    /// Constant terms of the mock form at every cusp and C_E at the
    /// prime levels.
    Constants {
        #[arg(long)]
        level: u32,
        #[arg(long)]
        json: bool,
    },
    /// Apply an operator word (e.g. "W11,T3,B1") to the cusp data of the
    /// completed Weierstrass mock modular form.
    Op {
        #[arg(long)]
        word: String,
        #[arg(long)]
        level: u32,
        #[arg(long)]
        json: bool,
    },
    /// Exact Kloosterman sum K(m, n, c).
    Kloosterman { m: i64, n: i64, c: u64 },
    /// Fourier coefficient of the weight-0 Maass-Poincare series.
    Poincare {
        #[arg(long)]
        level: u32,
        /// Pole order of the series (the index m of P_m).
        #[arg(long)]
        index: u32,
        /// Coefficient index n.
        #[arg(long)]
        coeff: u32,
        #[arg(long, default_value_t = 2000)]
        cmax: u32,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate the dimension formulas on a twisted-dimension table.
    Dim {
        /// JSON file with {"level", "dim_v1_fixed", "twisted": [...]}.
        #[arg(long)]
        input: String,
        #[arg(long)]
        json: bool,
    },
    /// Run a verification suite: lattice, curves, operators, kloosterman,
    /// poincare, dimensions, or all.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
        /// Seed for the randomized sweeps.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Kloosterman truncation for the poincare suite; small values
        /// force the tail-bound failure path.
        #[arg(long, default_value_t = weiermock::verify::DEFAULT_POINCARE_CMAX)]
        cmax: u32,
    },
}

/// Numerics are printed with 12 significant digits.
fn sig(x: f64) -> String {
    format!("{x:.11e}")
}

fn sigc(z: Complex64) -> String {
    format!("{} + {}i", sig(z.re), sig(z.im))
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Curve {
            level,
            json,
            coeffs,
        } => {
            let model = EllipticCurveModel::for_level(level)?;
            let nf = newform_coefficients(&model, coeffs.max(level as usize) + 1)?;
            let l = l_value_at_1(&newform_coefficients(&model, 600)?)?;
            let eps: Vec<(u64, i8)> = divisors(level as u64)
                .into_iter()
                .filter(|q| *q > 1)
                .map(|q| (q, nf.atkin_lehner_eigenvalue(q as u32).unwrap()))
                .collect();
            if json {
                let record = json!({
                    "level": level,
                    "a_invariants": [model.a1, model.a2, model.a3, model.a4, model.a6],
                    "discriminant": model.discriminant(),
                    "j_invariant": model.j_invariant().to_string(),
                    "coefficients": (1..=coeffs).map(|n| nf.a(n)).collect::<Vec<_>>(),
                    "atkin_lehner": eps.iter().map(|(q, e)| json!({"q": q, "eps": e})).collect::<Vec<_>>(),
                    "l_value": l.value,
                });
                println!("{}", serde_json::to_string_pretty(&record)?);
            } else {
                println!(
                    "X_0({level}): y^2 {} xy {} y = x^3 {} x^2 {} x {}",
                    signed(model.a1),
                    signed(model.a3),
                    signed(model.a2),
                    signed(model.a4),
                    signed(model.a6)
                );
                println!(
                    "discriminant {}  j = {}",
                    model.discriminant(),
                    model.j_invariant()
                );
                let table: Vec<String> = (1..=coeffs)
                    .map(|n| format!("a({n}) = {}", nf.a(n)))
                    .collect();
                println!("{}", table.join(", "));
                for (q, e) in eps {
                    println!("eps_{q} = {e}");
                }
                println!("L(E,1) = {}", sig(l.value));
            }
            Ok(0)
        }
        Command::ZetaValue { level, json } => {
            let model = EllipticCurveModel::for_level(level)?;
            let lat = compute_periods(&model)?;
            let nf = newform_coefficients(&model, 600)?;
            let l = l_value_at_1(&nf)?;
            let zh = completed_zeta_eval(&lat, Complex64::new(l.value, 0.0))?;
            if json {
                let record = json!({
                    "level": level,
                    "omega1": [lat.omega1.re, lat.omega1.im],
                    "omega2": [lat.omega2.re, lat.omega2.im],
                    "eta1": [lat.eta1.re, lat.eta1.im],
                    "eta2": [lat.eta2.re, lat.eta2.im],
                    "covolume": lat.covolume,
                    "g2_star": [lat.g2_star.re, lat.g2_star.im],
                    "zbar_coeff": lat.zbar_coeff,
                    "l_value": l.value,
                    "zeta_hat_at_l": [zh.re, zh.im],
                });
                println!("{}", serde_json::to_string_pretty(&record)?);
            } else {
                println!("omega1 = {}", sigc(lat.omega1));
                println!("omega2 = {}", sigc(lat.omega2));
                println!("eta1   = {}", sigc(lat.eta1));
                println!("eta2   = {}", sigc(lat.eta2));
                println!("covolume A = {}", sig(lat.covolume));
                println!("s = G_2^* = {}", sigc(lat.g2_star));
                println!("c = pi/A  = {}", sig(lat.zbar_coeff));
                println!("L(E,1) = {}", sig(l.value));
                println!("zeta_hat(Lambda; L(E,1)) = {}", sigc(zh));
                println!("convention: omega1 real positive, Im(omega2/omega1) > 0, L(E,1) > 0");
            }
            Ok(0)
        }
        Command::Constants { level, json } => {
            let data = LevelData::build(level)?;
            let mock = &data.mock;
            let prime = weiermock::curves::prime_levels().contains(&level);
            let ce = if prime {
                Some(constant_c_e(&mock.model, &mock.newform, &mock.lattice)?)
            } else {
                None
            };
            if json {
                let record = json!({
                    "level": level,
                    "c_e_0": [mock.qexp.constant_term.re, mock.qexp.constant_term.im],
                    "cusp_constants": mock.cusp_constants.iter()
                        .map(|(q, v)| json!({"q": q, "value": [v.re, v.im]}))
                        .collect::<Vec<_>>(),
                    "c_e": ce.as_ref().map(|c| c.c_e),
                    "residual_vs_minus_24_over_p_minus_1":
                        ce.as_ref().map(|c| c.residual_vs_minus_24_over_p_minus_1),
                });
                println!("{}", serde_json::to_string_pretty(&record)?);
            } else {
                println!("c_E(0) = {}", sigc(mock.qexp.constant_term));
                for (q, v) in &mock.cusp_constants {
                    if *q > 1 {
                        println!("c_E,{q}(0) = {}", sigc(*v));
                    }
                }
                if let Some(ce) = ce {
                    println!("C_E = {}", sig(ce.c_e));
                    println!(
                        "|C_E + 24/(p-1)| = {}",
                        sig(ce.residual_vs_minus_24_over_p_minus_1)
                    );
                }
            }
            Ok(0)
        }
        Command::Op { word, level, json } => {
            let w = OperatorWord::parse(&word)?;
            let out = zhat_cusp_data(level)?.apply_word(&w)?;
            if json {
                let slots: Vec<_> = out
                    .slots()
                    .map(|(q, s)| {
                        json!({
                            "cusp": q,
                            "poles": s.poles.iter()
                                .map(|(e, c)| json!({"exponent": e, "coeff": c.to_string()}))
                                .collect::<Vec<_>>(),
                            "constant": s.constant.to_string(),
                        })
                    })
                    .collect();
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "level": out.level(),
                        "word": w.to_string(),
                        "slots": slots,
                    }))?
                );
            } else {
                println!("Zhat_E | {w} starting at level {level}:");
                print!("{out}");
            }
            Ok(0)
        }
        Command::Kloosterman { m, n, c } => {
            println!("{}", sig(kloosterman_sum(m, n, c)?));
            Ok(0)
        }
        Command::Poincare {
            level,
            index,
            coeff,
            cmax,
            json,
        } => {
            let a = poincare_coefficient(index, coeff, level, cmax)?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "level": level, "index": index, "coeff": coeff, "cmax": cmax,
                        "value": a.value,
                        "tail_next_block_bound": a.tail.trivial_next_block,
                        "tail_rms_estimate": a.tail.rms_estimate,
                    }))?
                );
            } else {
                println!("a_{index}({coeff}) at level {level}, c <= {cmax}:");
                println!("value = {}", sig(a.value));
                println!(
                    "tail: next-block bound {}, rms estimate {}",
                    sig(a.tail.trivial_next_block),
                    sig(a.tail.rms_estimate)
                );
            }
            Ok(0)
        }
        Command::Dim { input, json } => {
            let text = std::fs::read_to_string(&input)?;
            let table = DimensionTable::from_json(&text)?;
            let level = table.level;
            let data = LevelData::build(level)?;
            let asm = assemble_character(&table)?;
            let asm_value = data.eval_symbolic(&asm.dimension_sum);
            let mut agree = true;
            if weiermock::curves::prime_levels().contains(&level) {
                let (closed, s) = dim_formula_prime_symbolic(&table)?;
                agree = closed == asm.dimension_sum;
                let closed_value = data.eval_symbolic(&closed);
                if json {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&json!({
                            "level": level,
                            "assembly_symbolic": asm.dimension_sum.to_string(),
                            "closed_symbolic": closed.to_string(),
                            "paths_agree": agree,
                            "sigma_weighted_sum": s,
                            "value": [closed_value.re, closed_value.im],
                        }))?
                    );
                } else {
                    println!("closed formula : {closed}");
                    println!("assembly       : {}", asm.dimension_sum);
                    println!("paths agree    : {agree}");
                    println!("sigma-weighted sum S = {s} (rationality predicate: S != p-1)");
                    println!("dim V_1 + dim V_1^orb = {}", sig(closed_value.re));
                }
            } else {
                let rep = dim_formula_composite(&table)?;
                let printed_value = data.eval_symbolic(&rep.printed);
                let disc_value = data.eval_symbolic(&rep.discrepancy);
                if json {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&json!({
                            "level": level,
                            "assembly_symbolic": rep.assembly.to_string(),
                            "printed_symbolic": rep.printed.to_string(),
                            "discrepancy_symbolic": rep.discrepancy.to_string(),
                            "assembly_value": [asm_value.re, asm_value.im],
                            "printed_value": [printed_value.re, printed_value.im],
                        }))?
                    );
                } else {
                    println!("assembly (authoritative) : {}", rep.assembly);
                    println!("  numeric value          : {}", sig(asm_value.re));
                    println!("printed closed form      : {}", rep.printed);
                    println!("  numeric value          : {}", sig(printed_value.re));
                    println!(
                        "printed - assembly       : {} (numeric {})",
                        rep.discrepancy,
                        sig(disc_value.re)
                    );
                    println!("(the printed statement's irregularities are reported, not patched)");
                }
            }
            Ok(if agree { 0 } else { 1 })
        }
        Command::Verify { suite, seed, cmax } => {
            let reports = run_suite(&suite, seed, cmax).map_err(std::io::Error::other)?;
            let mut all_ok = true;
            println!("seed {seed}");
            for rep in &reports {
                println!("== suite {} ({:?})", rep.suite, rep.elapsed);
                for c in &rep.checks {
                    let status = if c.pass { "PASS" } else { "FAIL" };
                    let tol = if c.tolerance.is_finite() {
                        format!("tol {:.1e}", c.tolerance)
                    } else {
                        "reported".to_string()
                    };
                    let note = c
                        .note
                        .as_ref()
                        .map(|n| format!("  [{n}]"))
                        .unwrap_or_default();
                    println!(
                        "{status} {name}: residual {res:.3e} ({tol}){note}",
                        name = c.name,
                        res = c.residual
                    );
                }
                all_ok &= rep.passed();
            }
            println!("overall: {}", if all_ok { "PASS" } else { "FAIL" });
            Ok(if all_ok { 0 } else { 2 })
        }
    }
}

fn signed(x: i64) -> String {
    if x >= 0 {
        format!("+ {x}")
    } else {
        format!("- {}", -x)
    }
}
