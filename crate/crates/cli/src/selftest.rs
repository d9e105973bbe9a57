//! Seeded property suites behind `rlab selftest`.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_rational::Ratio;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use rlab_core::analytic::{exp_eta, pexp, plog, EtaGuard};
use rlab_core::embed::radical_extension;
use rlab_core::forms::{exp2_eval, kernel_check, norm_diagram_check, FormExpression};
use rlab_core::laurent::{residue_diagram_check, WedgeOrder};
use rlab_core::oracle::{check_supported, NormOracle};
use rlab_core::par::Exec;
use rlab_core::reciprocity::{hilbert_symbol, sen_symbol, CyclotomicContext};
use rlab_core::roots::pth_power_test;
use rlab_core::sample::{random_element_with, rng_from_seed, Constraint};
use rlab_core::{canonical_poly_lift, Error, Field, FieldDesc, KElement, Poly};

use crate::commands::build_field;
use crate::report::{FieldInfo, Failure, Outcome, PrecisionInfo, Report, EXIT_PASS, EXIT_PROPERTY};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Arith,
    Analytic,
    Bilinearity,
    Lifts,
    Kernel,
    NormDiagram,
    ResidueDiagram,
    OracleConcordance,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Arith,
        Suite::Analytic,
        Suite::Bilinearity,
        Suite::Lifts,
        Suite::Kernel,
        Suite::NormDiagram,
        Suite::ResidueDiagram,
        Suite::OracleConcordance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Arith => "arith",
            Suite::Analytic => "analytic",
            Suite::Bilinearity => "bilinearity",
            Suite::Lifts => "lifts",
            Suite::Kernel => "kernel",
            Suite::NormDiagram => "norm-diagram",
            Suite::ResidueDiagram => "residue-diagram",
            Suite::OracleConcordance => "oracle-concordance",
        }
    }

    /// Seed of this suite's generator; independent of which other suites run.
    pub fn seed(self, seed: u64) -> u64 {
        let i = Suite::ALL.iter().position(|&s| s == self).unwrap() as u64;
        seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(i + 1)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses a `--suite` value; `all` expands to every suite.
pub fn parse_suites(name: &str) -> Result<Vec<Suite>, Failure> {
    if name == "all" {
        return Ok(Suite::ALL.to_vec());
    }
    Suite::from_str(name).map(|s| vec![s])
}

impl FromStr for Suite {
    type Err = Failure;

    fn from_str(s: &str) -> Result<Self, Failure> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
            Failure::Usage(format!("unknown suite {s:?}; expected one of {}, all", names.join(", ")))
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyResult {
    pub name: &'static str,
    pub checked: usize,
    pub passed: usize,
    /// First failing input, echoed as expressions.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub suite: &'static str,
    pub seed: u64,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub properties: Vec<PropertyResult>,
}

impl SuiteResult {
    pub fn failed(&self) -> bool {
        self.status == "fail"
    }
}

/// One sample: the inputs drawn and whether the property held.
struct Trial {
    inputs: Value,
    outcome: Result<bool, Error>,
}

fn trial(inputs: Value, check: impl FnOnce() -> Result<bool, Error>) -> Trial {
    Trial { inputs, outcome: check() }
}

struct Runner<'a> {
    rng: ChaCha8Rng,
    samples: usize,
    props: Vec<PropertyResult>,
    field: &'a Field,
}

impl<'a> Runner<'a> {
    fn property(&mut self, name: &'static str, mut f: impl FnMut(&Field, &mut ChaCha8Rng) -> Trial) {
        self.property_n(name, self.samples, &mut f)
    }

    fn property_n(&mut self, name: &'static str, n: usize, f: &mut dyn FnMut(&Field, &mut ChaCha8Rng) -> Trial) {
        let mut out = PropertyResult { name, checked: 0, passed: 0, counterexample: None };
        for _ in 0..n {
            let t = f(self.field, &mut self.rng);
            out.checked += 1;
            match t.outcome {
                Ok(true) => out.passed += 1,
                Ok(false) => {
                    out.counterexample.get_or_insert(t.inputs);
                }
                Err(e) => {
                    out.counterexample.get_or_insert(json!({ "inputs": t.inputs, "error": e.to_string() }));
                }
            }
        }
        self.props.push(out);
    }
}

fn s(x: &KElement) -> String {
    x.to_string()
}

fn integral(k: &Field, rng: &mut ChaCha8Rng) -> KElement {
    random_element_with(k, Constraint::Integral, rng)
}

fn unit(k: &Field, rng: &mut ChaCha8Rng) -> KElement {
    random_element_with(k, Constraint::Unit, rng)
}

/// Principal unit in the symbol domain, `ord(x - 1) >= 2/(p-1)`.
fn principal(k: &Field, rng: &mut ChaCha8Rng) -> KElement {
    random_element_with(k, Constraint::PrincipalUnit(Ratio::new(2, k.p() as i64 - 1)), rng)
}

/// Principal unit strictly inside the convergence disc of `exp`.
fn small_principal(k: &Field, rng: &mut ChaCha8Rng) -> KElement {
    let (p, e) = (k.p() as i64, k.e() as i64);
    random_element_with(k, Constraint::PrincipalUnit(Ratio::new(e / (p - 1) + 1, e)), rng)
}

fn arith(r: &mut Runner) {
    r.property("ring_axioms", |k, rng| {
        let (x, y, z) = (integral(k, rng), integral(k, rng), integral(k, rng));
        trial(json!([s(&x), s(&y), s(&z)]), || {
            Ok(&(&x * &y) * &z == &x * &(&y * &z) && &x * &(&y + &z) == &(&x * &y) + &(&x * &z))
        })
    });
    r.property("unit_inverse", |k, rng| {
        let u = unit(k, rng);
        trial(json!([s(&u)]), || Ok(&u * &u.inv()? == k.one()))
    });
    r.property("valuation_additive", |k, rng| {
        let x = &unit(k, rng) * &k.pi().pow_u(rng.random_range(0..4));
        let y = &unit(k, rng) * &k.pi().pow_u(rng.random_range(0..4));
        trial(json!([s(&x), s(&y)]), || Ok((&x * &y).ord()? == x.ord()? + y.ord()?))
    });
    r.property("trace_additive_norm_multiplicative", |k, rng| {
        let (x, y) = (integral(k, rng), integral(k, rng));
        trial(json!([s(&x), s(&y)]), || {
            Ok((&x + &y).trace_abs().congruent(&x.trace_abs().add(&y.trace_abs()))
                && (&x * &y).norm_abs().congruent(&x.norm_abs().mul(&y.norm_abs())))
        })
    });
    r.property("record_round_trip", |k, rng| {
        let x = integral(k, rng).scale_p(rng.random_range(-2..3));
        trial(json!([s(&x)]), || {
            let back = KElement::from_record(k, &x.to_record())?;
            Ok(back.prec() == x.prec() && back == x)
        })
    });
}

fn analytic(r: &mut Runner) {
    r.property("log_exp_round_trip", |k, rng| {
        let x = small_principal(k, rng);
        let y = &small_principal(k, rng) - &k.one();
        trial(json!([s(&x), s(&y)]), || Ok(pexp(&plog(&x)?)? == x && plog(&pexp(&y)?)? == y))
    });
    r.property("log_additive", |k, rng| {
        let (x, y) = (small_principal(k, rng), small_principal(k, rng));
        trial(json!([s(&x), s(&y)]), || Ok(plog(&(&x * &y))? == &plog(&x)? + &plog(&y)?))
    });
    r.property("exp_eta_homomorphism", |k, rng| {
        let eta = k.int(k.p());
        let (a, b) = (integral(k, rng), integral(k, rng));
        trial(json!([s(&a), s(&b)]), || {
            let ex = |t: &KElement| exp_eta(&eta, t, EtaGuard::Theorem);
            Ok(ex(&(&a + &b))? == &ex(&a)? * &ex(&b)?)
        })
    });
    r.property_n("boundary_rejected", 1, &mut |k, _| {
        let (p, e) = (k.p() as i64, k.e() as i64);
        let x = k.pi().pow_u((e / (p - 1)) as u64);
        let exact_boundary = e % (p - 1) == 0;
        trial(json!([s(&x)]), || Ok(!exact_boundary || matches!(pexp(&x), Err(Error::Domain { .. }))))
    });
}

fn bilinearity(r: &mut Runner, ctx: &CyclotomicContext) {
    r.property("bilinear_and_inverse", |k, rng| {
        let (a1, a2) = (principal(k, rng), principal(k, rng));
        let b1 = &unit(k, rng) * &k.pi().pow_u(rng.random_range(0..3));
        let b2 = unit(k, rng);
        trial(json!([s(&a1), s(&a2), s(&b1), s(&b2)]), || {
            let h = |a: &KElement, b: &KElement| hilbert_symbol(ctx, a, b);
            let c = h(&a1, &b1)?;
            Ok(h(&a1, &(&b1 * &b2))? == c.add(&h(&a1, &b2)?)
                && h(&(&a1 * &a2), &b1)? == c.add(&h(&a2, &b1)?)
                && h(&a1, &b1.inv()?)? == c.neg())
        })
    });
    r.property("steinberg_minus_alpha", |k, rng| {
        let a = principal(k, rng);
        trial(json!([s(&a)]), || Ok(hilbert_symbol(ctx, &a, &(-&a))?.is_trivial()))
    });
    r.property("pth_powers_pair_trivially", |k, rng| {
        let (a, b) = (principal(k, rng), unit(k, rng));
        trial(json!([s(&a), s(&b)]), || Ok(hilbert_symbol(ctx, &a, &b.pow_u(k.p()))?.is_trivial()))
    });
}

fn lifts(r: &mut Runner, ctx: Option<&CyclotomicContext>) {
    r.property("canonical_lift_round_trip", |k, rng| {
        let x = integral(k, rng);
        trial(json!([s(&x)]), || Ok(canonical_poly_lift(&x)?.eval(&k.pi()) == x))
    });
    r.property("pth_power_witness", |k, rng| {
        let y = &unit(k, rng) * &k.pi().pow_u(rng.random_range(0..3));
        trial(json!([s(&y)]), || {
            let t = pth_power_test(&y.pow_u(k.p()))?;
            Ok(t.is_power && t.witness.is_some_and(|w| w.pow_u(k.p()) == y.pow_u(k.p())))
        })
    });
    let Some(ctx) = ctx else { return };
    r.property("sen_ignores_the_lift", |k, rng| {
        let prec = k.work_prec();
        let (alpha, beta) = (principal(k, rng), unit(k, rng));
        let q = Poly::new(k, (0..3).map(|_| integral(k, rng).reduce_prec(prec)).collect());
        let qs: Vec<String> = q.coeffs().iter().map(s).collect();
        trial(json!({ "alpha": s(&alpha), "beta": s(&beta), "perturbation": qs }), || {
            let g = canonical_poly_lift(&beta)?;
            let g2 = g.add(&q.mul(&Poly::eisenstein(k)));
            Ok(sen_symbol(ctx, &alpha, &beta, &g)? == sen_symbol(ctx, &alpha, &beta, &g2)?)
        })
    });
}

fn kernel(r: &mut Runner, ctx: &CyclotomicContext) {
    r.property("p_dO_in_kernel", |k, rng| {
        let a = unit(k, rng);
        trial(json!([s(&a)]), || Ok(kernel_check(ctx, &a)?.is_trivial()))
    });
    r.property("exp2_well_defined", |k, rng| {
        let eta = k.int(k.p());
        let mut expr = FormExpression::new(k);
        let mut echo = Vec::new();
        for _ in 0..3 {
            let (a, b) = (integral(k, rng), unit(k, rng));
            echo.push([s(&a), s(&b)]);
            if let Err(e) = expr.push(a, b) {
                return Trial { inputs: json!(echo), outcome: Err(e) };
            }
        }
        let i = rng.random_range(0..expr.len());
        let b1 = unit(k, rng);
        trial(json!({ "form": echo, "split": i, "by": s(&b1) }), || {
            let split = expr.split_term(i, &b1)?;
            Ok(exp2_eval(ctx, &eta, &expr)? == exp2_eval(ctx, &eta, &split)?)
        })
    });
}

fn norm_diagram(r: &mut Runner, small: &CyclotomicContext) -> Result<(), Error> {
    let (big, emb) = radical_extension(r.field, 2)?;
    let zeta = emb.embed(small.zeta());
    let large = CyclotomicContext::with_zeta(&big, zeta)?;
    let eta = r.field.int(r.field.p());
    r.property("norm_trace_square", |k, rng| {
        let a = integral(&big, rng);
        let b = unit(k, rng);
        trial(json!({ "a": s(&a), "b": s(&b) }), || Ok(norm_diagram_check(&large, small, &emb, &eta, &a, &b)?.holds()))
    });
    Ok(())
}

fn residue_diagram(r: &mut Runner, ctx: &CyclotomicContext) {
    let eta = r.field.int(r.field.p());
    r.property("residue_square", |k, rng| {
        let (a, b) = (integral(k, rng), unit(k, rng));
        trial(json!([s(&a), s(&b)]), || {
            let last = residue_diagram_check(ctx, &eta, &a, &b, WedgeOrder::TLast, 4)?;
            let first = residue_diagram_check(ctx, &eta, &a, &b, WedgeOrder::TFirst, 4)?;
            Ok(last.holds() && first.holds() && first.top == last.top.neg())
        })
    });
}

fn oracle_concordance(r: &mut Runner, ctx: &CyclotomicContext) -> Result<(), Error> {
    let oracle = NormOracle::new(r.field)?;
    let zeta = ctx.zeta().clone();
    let fixed = [zeta.clone(), zeta.square(), -&zeta];
    let mut i = 0;
    r.property("sen_trivial_iff_norm", |k, rng| {
        let alpha = principal(k, rng);
        let beta = if i % 4 < 3 { fixed[i % 4].clone() } else { unit(k, rng) };
        i += 1;
        trial(json!([s(&alpha), s(&beta)]), || {
            let c = hilbert_symbol(ctx, &alpha, &beta)?;
            let v = oracle.verdict(&alpha, &beta)?;
            Ok(c.is_trivial() == v.is_norm && (v.degenerate || v.rank + 1 == oracle.space().dim()))
        })
    });
    Ok(())
}

fn skipped(suite: Suite, seed: u64, reason: String) -> SuiteResult {
    SuiteResult { suite: suite.name(), seed, status: "skipped", reason: Some(reason), properties: Vec::new() }
}

/// Runs one suite; suites needing `zeta_{p^n}` are skipped on fields
/// without one.
pub fn run_suite(field: &Field, suite: Suite, seed: u64, samples: usize) -> SuiteResult {
    let seed = suite.seed(seed);
    let mut r = Runner { rng: rng_from_seed(seed), samples, props: Vec::new(), field };
    let ctx = CyclotomicContext::new(field);
    let need_ctx = || ctx.as_ref().map_err(|e| e.to_string());
    let ran: Result<(), String> = match suite {
        Suite::Arith => Ok(arith(&mut r)),
        Suite::Analytic => Ok(analytic(&mut r)),
        Suite::Lifts => Ok(lifts(&mut r, ctx.as_ref().ok())),
        Suite::Bilinearity => need_ctx().map(|c| bilinearity(&mut r, c)),
        Suite::Kernel => need_ctx().map(|c| kernel(&mut r, c)),
        Suite::ResidueDiagram => need_ctx().map(|c| residue_diagram(&mut r, c)),
        Suite::NormDiagram => need_ctx().and_then(|c| norm_diagram(&mut r, c).map_err(|e| e.to_string())),
        Suite::OracleConcordance => match check_supported(field.p(), field.level()) {
            Err(e) => Err(e.to_string()),
            Ok(()) => need_ctx().and_then(|c| oracle_concordance(&mut r, c).map_err(|e| e.to_string())),
        },
    };
    if let Err(reason) = ran {
        return skipped(suite, seed, reason);
    }
    let ok = r.props.iter().all(|p| p.passed == p.checked);
    SuiteResult { suite: suite.name(), seed, status: if ok { "pass" } else { "fail" }, reason: None, properties: r.props }
}

pub fn cmd_selftest(desc: &FieldDesc, suite: &str, seed: u64, samples: usize) -> Outcome {
    let args = json!({ "suite": suite, "seed": seed, "samples": samples });
    let body = (|| {
        let suites = parse_suites(suite)?;
        if samples == 0 {
            return Err(Failure::Usage("--samples must be positive".into()));
        }
        let field = build_field(desc)?;
        let results = Exec::default().map(&suites, |&su| {
            let start = Instant::now();
            let res = run_suite(&field, su, seed, samples);
            eprintln!("selftest {su}: {} in {:.2}s", res.status, start.elapsed().as_secs_f64());
            res
        });
        let failed: Vec<&str> = results.iter().filter(|r| r.failed()).map(|r| r.suite).collect();
        let exit = if failed.is_empty() { EXIT_PASS } else { EXIT_PROPERTY };
        Ok(Outcome {
            exit,
            report: Report {
                command: "selftest".into(),
                args: args.clone(),
                field: Some(FieldInfo::of(desc)),
                inputs: Value::Null,
                outputs: json!({ "suites": results, "failed": failed }),
                precision: Some(PrecisionInfo::unchecked(&field)),
                status: if exit == EXIT_PASS { "pass" } else { "fail" },
                error: None,
            },
        })
    })();
    match body {
        Ok(o) => o,
        Err(f) => Outcome { exit: f.exit_code(), report: Report::failure("selftest", args, Some(FieldInfo::of(desc)), &f) },
    }
}
