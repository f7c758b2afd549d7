//! `oqdb`: command-line surface over the quantum-group library. JSON in on
//! stdin or `--in`, JSON out on stdout or `--out`; exit code 0 iff every
//! asserted residual passes.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use oqdb::braid::{
    drinfeld_closure, evaluate_braid, jones_smoke, pivotal_closure, BraidWord, ColoredBraid,
};
use oqdb::braiding::{
    closed_formula_r, compare_drinfeld_kashaev, intertwiner_residuals, yang_baxter_check,
    PairContext, RootChoices,
};
use oqdb::cg::cg_decompose;
use oqdb::qgroup::{
    build_generators, casimir_and_center_check, hopf_axiom_check, verify_presentation,
    RelationReport,
};
use oqdb::reps::{
    build_rep, classical_shadow, sample_standard, weight_to_standard, StandardModuleSpec,
    WeightModuleSpec,
};
use oqdb::scalars::{C64, RootContext};

#[derive(Parser)]
#[command(name = "oqdb", about = "Quantum group of quantum Teichmüller theory at odd roots of unity")]
struct Cli {
    /// Odd order N ≥ 3 of the root of unity.
    #[arg(long = "N", global = true, default_value_t = 3)]
    n: u32,
    /// Exponent k coprime to N: ω = exp(2πik/N).
    #[arg(long, global = true, default_value_t = 1)]
    k: u32,
    /// Residual tolerance for pass/fail decisions.
    #[arg(long, global = true, default_value_t = 1e-6)]
    eps: f64,
    /// Seed for any random sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Root policy: "principal" or "index:<w1p>,<w2pp>,<w3pp>,<w4p>[,neg]".
    #[arg(long, global = true, default_value = "principal")]
    roots: String,
    /// Input JSON file (default: stdin when input is required).
    #[arg(long = "in", global = true)]
    infile: Option<PathBuf>,
    /// Output JSON file (default: stdout).
    #[arg(long = "out", global = true)]
    outfile: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact identity checks on the presentation and Hopf structure.
    Verify {
        #[command(subcommand)]
        what: VerifyCmd,
    },
    /// Weight-module operations.
    Rep {
        #[command(subcommand)]
        what: RepCmd,
    },
    /// Clebsch–Gordan decomposition of a tensor product of weight modules.
    CgDecompose,
    /// Braiding operators and their verifications.
    Braiding {
        #[command(subcommand)]
        what: BraidingCmd,
    },
    /// Colored braid evaluation and closures.
    Braid {
        #[command(subcommand)]
        what: BraidCmd,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Defining relations of the quantum group (exact).
    Presentation,
    /// Coassociativity, counit, and antipode laws (exact).
    Hopf,
    /// Casimir and central-element identities (exact).
    Center,
}

#[derive(Subcommand)]
enum RepCmd {
    /// Build the matrices of a weight module from a JSON spec.
    Build,
    /// Classical shadow (central character) of a weight module.
    Shadow,
    /// Family and standard-module extendability of a weight module.
    Classify,
}

#[derive(Subcommand)]
enum BraidingCmd {
    /// Closed-formula braiding of a standard-module pair.
    Compute,
    /// Per-equation intertwiner residuals of the braiding.
    Residual,
    /// Colored Yang–Baxter check on a triple (random if no input).
    YangBaxter,
    /// Compare the series R-matrix with the closed formula on scalar lifts.
    DrinfeldCompare,
}

#[derive(Subcommand)]
enum BraidCmd {
    /// Evaluate a colored braid word into an operator.
    Eval,
    /// Pivotal closure scalar of a colored braid word (experimental).
    Close,
    /// Three-route smoke comparison on scalar colorings.
    Smoke,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((value, pass)) => {
            let text = serde_json::to_string_pretty(&value).expect("serializable");
            match &cli.outfile {
                Some(p) => {
                    if let Err(e) = std::fs::write(p, text + "\n") {
                        eprintln!("error: cannot write {}: {e}", p.display());
                        return ExitCode::from(2);
                    }
                }
                None => println!("{text}"),
            }
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn parse_roots(s: &str) -> Result<RootChoices> {
    if s == "principal" {
        return Ok(RootChoices::default());
    }
    let rest = s
        .strip_prefix("index:")
        .ok_or_else(|| anyhow!("--roots must be 'principal' or 'index:<list>'"))?;
    let parts: Vec<&str> = rest.split(',').collect();
    if parts.len() < 4 {
        bail!("--roots index form needs four indices");
    }
    let idx = |i: usize| -> Result<u32> {
        parts[i]
            .trim()
            .parse()
            .with_context(|| format!("bad root index '{}'", parts[i]))
    };
    Ok(RootChoices {
        w1p: idx(0)?,
        w2pp: idx(1)?,
        w3pp: idx(2)?,
        w4p: idx(3)?,
        sroot_negate: parts.get(4).map(|p| p.trim() == "neg").unwrap_or(false),
    })
}

fn read_input(cli: &Cli) -> Result<Value> {
    let text = match &cli.infile {
        Some(p) => std::fs::read_to_string(p)
            .with_context(|| format!("cannot read {}", p.display()))?,
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .context("cannot read stdin")?;
            buf
        }
    };
    serde_json::from_str(&text).context("input is not valid JSON")
}

fn c2(z: C64) -> Value {
    json!([z.re, z.im])
}

fn mat_json(m: &DMatrix<C64>) -> Value {
    let rows: Vec<Value> = (0..m.nrows())
        .map(|i| Value::Array((0..m.ncols()).map(|j| c2(m[(i, j)])).collect()))
        .collect();
    Value::Array(rows)
}

fn reports_json(reports: &[RelationReport]) -> (Value, bool) {
    let pass = reports.iter().all(|r| r.pass);
    let v = json!({
        "reports": reports.iter()
            .map(|r| json!({"id": r.id, "pass": r.pass}))
            .collect::<Vec<_>>(),
        "pass": pass,
    });
    (v, pass)
}

fn weight_spec(v: &Value) -> Result<WeightModuleSpec> {
    WeightModuleSpec::from_json(v).map_err(|e| anyhow!("bad weight-module spec: {e}"))
}

fn standard_spec(v: &Value) -> Result<StandardModuleSpec> {
    StandardModuleSpec::from_json(v).map_err(|e| anyhow!("bad standard-module spec: {e}"))
}

fn run(cli: &Cli) -> Result<(Value, bool)> {
    let ctx = RootContext::new(cli.n, cli.k).map_err(|e| anyhow!("{e:?}"))?;
    let roots = parse_roots(&cli.roots)?;
    match &cli.cmd {
        Cmd::Verify { what } => {
            let pc = PairContext::new(ctx).map_err(|e| anyhow!("{e:?}"))?;
            let gens = build_generators(&pc.alg, &pc.d1);
            let reports = match what {
                VerifyCmd::Presentation => verify_presentation(&gens),
                VerifyCmd::Hopf => hopf_axiom_check(&gens),
                VerifyCmd::Center => casimir_and_center_check(&gens),
            };
            Ok(reports_json(&reports))
        }
        Cmd::Rep { what } => {
            let input = read_input(cli)?;
            let spec = weight_spec(&input)?;
            match what {
                RepCmd::Build => {
                    let r = build_rep(&ctx, &spec).map_err(|e| anyhow!("{e:?}"))?;
                    let v = json!({
                        "dim": r.dim,
                        "e": mat_json(&r.e),
                        "f": mat_json(&r.f),
                        "khalf": mat_json(&r.khalf),
                        "lhalf": mat_json(&r.lhalf),
                    });
                    Ok((v, true))
                }
                RepCmd::Shadow => {
                    let r = build_rep(&ctx, &spec).map_err(|e| anyhow!("{e:?}"))?;
                    let ch = classical_shadow(&ctx, &r).map_err(|e| anyhow!("{e:?}"))?;
                    let m2 = |m: &[[C64; 2]; 2]| {
                        json!([[c2(m[0][0]), c2(m[0][1])], [c2(m[1][0]), c2(m[1][1])]])
                    };
                    let v = json!({
                        "gplus": m2(&ch.gplus),
                        "gminus": m2(&ch.gminus),
                        "t": ch.t.map(c2),
                        "hdel": c2(ch.hdel),
                    });
                    Ok((v, true))
                }
                RepCmd::Classify => {
                    let family = match &spec {
                        WeightModuleSpec::Diag { .. } => "diag",
                        WeightModuleSpec::Cyclic { .. } => "cyclic",
                        WeightModuleSpec::Semi { .. } => "semi",
                    };
                    let (std_spec, reason) = match weight_to_standard(&ctx, &spec) {
                        Ok(s) => (Some(s), None),
                        Err(e) => (None, Some(format!("{e:?}"))),
                    };
                    let v = json!({
                        "family": family,
                        "extendable": std_spec.is_some(),
                        "standard": std_spec.map(|s| s.to_json()),
                        "reason": reason,
                    });
                    Ok((v, true))
                }
            }
        }
        Cmd::CgDecompose => {
            let input = read_input(cli)?;
            let v1 = weight_spec(&input["v1"])?;
            let v2 = weight_spec(&input["v2"])?;
            let dec = cg_decompose(&ctx, &v1, &v2).map_err(|e| anyhow!("{e:?}"))?;
            let mut v = dec.to_json();
            v["tr_phi"] = c2(dec.tr_phi);
            Ok((v, true))
        }
        Cmd::Braiding { what } => {
            let pc = PairContext::new(ctx.clone()).map_err(|e| anyhow!("{e:?}"))?;
            match what {
                BraidingCmd::Compute | BraidingCmd::Residual => {
                    let input = read_input(cli)?;
                    let v1 = standard_spec(&input["v1"])?;
                    let v2 = standard_spec(&input["v2"])?;
                    let (r, oct) =
                        closed_formula_r(&pc, &v1, &v2, roots).map_err(|e| anyhow!("{e:?}"))?;
                    let residuals =
                        intertwiner_residuals(&pc, &r).map_err(|e| anyhow!("{e:?}"))?;
                    let max_resid = residuals.iter().fold(0.0f64, |a, (_, v)| a.max(*v));
                    let pass = max_resid < cli.eps;
                    let shape = |w: &oqdb::braiding::QShapeParameter| {
                        json!({"w": c2(w.w), "wp": c2(w.wp), "wpp": c2(w.wpp)})
                    };
                    let oct_json = json!({
                        "w1": shape(&oct.w1), "w2": shape(&oct.w2),
                        "w3": shape(&oct.w3), "w4": shape(&oct.w4),
                        "sroot": c2(oct.sroot),
                        "alpha": c2(oct.alpha), "beta": c2(oct.beta),
                        "x3": c2(oct.x3), "x4": c2(oct.x4), "x5": c2(oct.x5),
                        "U": c2(oct.cap_u), "W": c2(oct.cap_w),
                    });
                    let v = match what {
                        BraidingCmd::Compute => json!({
                            "R": mat_json(&r.matrix),
                            "det_phase": c2(r.d),
                            "residual": max_resid,
                            "octahedron": oct_json,
                            "target": [r.target.0.to_json(), r.target.1.to_json()],
                            "pass": pass,
                        }),
                        _ => json!({
                            "residuals": residuals.iter()
                                .map(|(k, v)| json!({"equation": k, "residual": v}))
                                .collect::<Vec<_>>(),
                            "residual": max_resid,
                            "octahedron": oct_json,
                            "pass": pass,
                        }),
                    };
                    Ok((v, pass))
                }
                BraidingCmd::YangBaxter => {
                    let (v1, v2, v3) = if cli.infile.is_some() {
                        let input = read_input(cli)?;
                        (
                            standard_spec(&input["v1"])?,
                            standard_spec(&input["v2"])?,
                            standard_spec(&input["v3"])?,
                        )
                    } else {
                        let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
                        (
                            sample_standard(&ctx, &mut rng),
                            sample_standard(&ctx, &mut rng),
                            sample_standard(&ctx, &mut rng),
                        )
                    };
                    let rep = yang_baxter_check(&pc, &v1, &v2, &v3)
                        .map_err(|e| anyhow!("{e:?}"))?;
                    let pass = rep.residual < cli.eps && rep.c_root_defect < 1e-5;
                    let v = json!({
                        "c": c2(rep.c),
                        "residual": rep.residual,
                        "c_root_defect": rep.c_root_defect,
                        "colors": [v1.to_json(), v2.to_json(), v3.to_json()],
                        "pass": pass,
                    });
                    Ok((v, pass))
                }
                BraidingCmd::DrinfeldCompare => {
                    let (v1, v2, h, g) = if cli.infile.is_some() {
                        let input = read_input(cli)?;
                        let cx = |v: &Value| -> Result<C64> {
                            let a = v
                                .as_array()
                                .ok_or_else(|| anyhow!("complex must be [re, im]"))?;
                            Ok(C64::new(
                                a[0].as_f64().ok_or_else(|| anyhow!("bad re"))?,
                                a[1].as_f64().ok_or_else(|| anyhow!("bad im"))?,
                            ))
                        };
                        (
                            weight_spec(&input["v1"])?,
                            weight_spec(&input["v2"])?,
                            cx(&input["h"])?,
                            cx(&input["g"])?,
                        )
                    } else {
                        let (s, h, g) = oqdb::braid::scalar_color(&ctx);
                        (s.clone(), s, h, g)
                    };
                    let (zeta, resid) = compare_drinfeld_kashaev(&pc, &v1, &v2, h, g, roots)
                        .map_err(|e| anyhow!("{e:?}"))?;
                    let nn = pc.ctx().n;
                    let defect = (zeta.powu(nn * nn) - Complex64::new(1.0, 0.0)).norm();
                    let pass = resid < cli.eps && defect < 1e-5;
                    let v = json!({
                        "zeta": c2(zeta),
                        "residual": resid,
                        "zeta_root_defect": defect,
                        "pass": pass,
                    });
                    Ok((v, pass))
                }
            }
        }
        Cmd::Braid { what } => {
            let pc = PairContext::new(ctx.clone()).map_err(|e| anyhow!("{e:?}"))?;
            match what {
                BraidCmd::Eval | BraidCmd::Close => {
                    let input = read_input(cli)?;
                    let strands = input["strands"]
                        .as_u64()
                        .ok_or_else(|| anyhow!("missing 'strands'"))?
                        as usize;
                    let letters: Vec<(usize, i8)> = input["letters"]
                        .as_array()
                        .ok_or_else(|| anyhow!("missing 'letters'"))?
                        .iter()
                        .map(|l| {
                            let a = l.as_array().ok_or_else(|| anyhow!("letter = [i, sign]"))?;
                            Ok((
                                a[0].as_u64().ok_or_else(|| anyhow!("bad index"))? as usize,
                                a[1].as_i64().ok_or_else(|| anyhow!("bad sign"))? as i8,
                            ))
                        })
                        .collect::<Result<_>>()?;
                    let colors: Vec<StandardModuleSpec> = input["colors"]
                        .as_array()
                        .ok_or_else(|| anyhow!("missing 'colors'"))?
                        .iter()
                        .map(standard_spec)
                        .collect::<Result<_>>()?;
                    let word = BraidWord::new(strands, letters).map_err(|e| anyhow!(e))?;
                    let cb = ColoredBraid::new(word, colors.clone()).map_err(|e| anyhow!(e))?;
                    let (op, fin) = evaluate_braid(&pc, &cb).map_err(|e| anyhow!("{e:?}"))?;
                    match what {
                        BraidCmd::Eval => {
                            let v = json!({
                                "dim": op.nrows(),
                                "op": mat_json(&op),
                                "final": fin.iter().map(|s| s.to_json()).collect::<Vec<_>>(),
                            });
                            Ok((v, true))
                        }
                        _ => {
                            let value = pivotal_closure(&pc, &op, &colors, &fin)
                                .map_err(|e| anyhow!("{e:?}"))?;
                            let v = json!({
                                "closure": c2(value),
                                "abs": value.norm(),
                                "status": "experimental",
                            });
                            Ok((v, true))
                        }
                    }
                }
                BraidCmd::Smoke => {
                    let mut out = Vec::new();
                    let mut pass = true;
                    for (name, word) in [
                        ("trefoil", BraidWord::trefoil()),
                        ("figure_eight", BraidWord::figure_eight()),
                    ] {
                        let rep = jones_smoke(&pc, &word).map_err(|e| anyhow!("{e:?}"))?;
                        let ok = rep.abs_dev_routes < cli.eps
                            && rep.abs_dev_oracle < cli.eps
                            && rep.phase_defect < cli.eps;
                        pass &= ok;
                        out.push(json!({
                            "knot": name,
                            "kashaev": c2(rep.kashaev),
                            "drinfeld": c2(rep.drinfeld),
                            "oracle_abs": rep.oracle_abs,
                            "abs_dev_routes": rep.abs_dev_routes,
                            "abs_dev_oracle": rep.abs_dev_oracle,
                            "phase_defect": rep.phase_defect,
                            "pass": ok,
                        }));
                    }
                    let _ = drinfeld_closure(&ctx, &BraidWord::trefoil());
                    Ok((json!({"knots": out, "status": "experimental", "pass": pass}), pass))
                }
            }
        }
    }
}
