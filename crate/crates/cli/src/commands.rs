//! The `symbol`, `oracle` and `expmap` commands.

use serde_json::{json, Value};

use rlab_core::forms::{exp2_eval, rewrite_to_zeta, FormExpression};
use rlab_core::oracle::{check_supported, NormOracle};
use rlab_core::reciprocity::{check_symbol_domain, hilbert_symbol, prime_slot, CyclotomicContext, SymbolValue};
use rlab_core::{make_field, Error, Field, FieldDesc, KElement};

use crate::expr::{eval, parse_expr, Expr};
use crate::report::{FieldInfo, Failure, Outcome, PrecisionInfo, Report, EXIT_PASS, EXIT_PRECISION, EXIT_PROPERTY};

/// Extra digits for the guard recomputation.
pub const RECHECK_DIGITS: i64 = 10;

pub fn build_field(desc: &FieldDesc) -> Result<Field, Failure> {
    Ok(make_field(desc.clone())?)
}

fn finish(command: &str, args: Value, desc: &FieldDesc, body: Result<Outcome, Failure>) -> Outcome {
    match body {
        Ok(o) => o,
        Err(f) => Outcome {
            exit: f.exit_code(),
            report: Report::failure(command, args, Some(FieldInfo::of(desc)), &f),
        },
    }
}

fn context(field: &Field, level: Option<u32>) -> Result<CyclotomicContext, Failure> {
    Ok(match level {
        Some(k) => CyclotomicContext::at_level(field, k)?,
        None => CyclotomicContext::new(field)?,
    })
}

struct SymbolRun {
    alpha: KElement,
    beta: KElement,
    value: SymbolValue,
    m: i64,
    prime: SymbolValue,
}

fn symbol_once(field: &Field, alpha: &Expr, beta: &Expr, level: Option<u32>) -> Result<SymbolRun, Failure> {
    let ctx = context(field, level)?;
    let a = eval(alpha, field)?;
    let b = eval(beta, field)?;
    check_symbol_domain(&a)?;
    let m = b.valuation_pi().ok_or(Error::IndistinguishableFromZero { prec: b.prec() })?;
    let value = hilbert_symbol(&ctx, &a, &b)?;
    let prime = prime_slot(&ctx, &a)?;
    Ok(SymbolRun { alpha: a, beta: b, value, m, prime })
}

fn recheck_field(field: &Field) -> Result<Field, Failure> {
    Ok(field.with_precision(field.work_prec() + RECHECK_DIGITS)?)
}

/// `(alpha, beta)` at the working precision and again ten digits higher.
pub fn cmd_symbol(desc: &FieldDesc, alpha: &str, beta: &str, level: Option<u32>) -> Outcome {
    let args = json!({ "alpha": alpha, "beta": beta, "n": level });
    let body = (|| {
        let (ea, eb) = (parse_expr(alpha)?, parse_expr(beta)?);
        let field = build_field(desc)?;
        let run = symbol_once(&field, &ea, &eb, level)?;
        let high = recheck_field(&field)?;
        let again = symbol_once(&high, &ea, &eb, level)?;
        let agrees = again.value == run.value && again.prime == run.prime;
        let unit_part = run.value.add(&run.prime.mul_int(-run.m));
        Ok(Outcome {
            exit: if agrees { EXIT_PASS } else { EXIT_PRECISION },
            report: Report {
                command: "symbol".into(),
                args: args.clone(),
                field: Some(FieldInfo::of(desc)),
                inputs: json!({ "alpha": run.alpha.to_string(), "beta": run.beta.to_string() }),
                outputs: json!({
                    "c": run.value.c(),
                    "modulus": run.value.modulus(),
                    "zeta_power": format!("zeta^{}", run.value.c()),
                    "beta_pi_valuation": run.m,
                    "prime_slot": run.prime.c(),
                    "unit_part": unit_part.c(),
                }),
                precision: Some(PrecisionInfo {
                    working: field.work_prec(),
                    recheck: Some(high.work_prec()),
                    recheck_agrees: Some(agrees),
                }),
                status: if agrees { "pass" } else { "fail" },
                error: None,
            },
        })
    })();
    finish("symbol", args, desc, body)
}

/// Norm test by exhaustive search, compared with the explicit formula when
/// `alpha` lies in its domain.
pub fn cmd_oracle(desc: &FieldDesc, alpha: &str, beta: &str) -> Outcome {
    let args = json!({ "alpha": alpha, "beta": beta });
    let body = (|| {
        check_supported(desc.p, desc.n)?;
        let (ea, eb) = (parse_expr(alpha)?, parse_expr(beta)?);
        let field = build_field(desc)?;
        let a = eval(&ea, &field)?;
        let b = eval(&eb, &field)?;
        let oracle = NormOracle::new(&field)?;
        let verdict = oracle.verdict(&a, &b)?;
        let mut precision = PrecisionInfo::unchecked(&field);
        let mut exit = EXIT_PASS;
        let concordance = match check_symbol_domain(&a) {
            Err(e) => json!({ "applicable": false, "reason": e.to_string() }),
            Ok(()) => {
                let run = symbol_once(&field, &ea, &eb, None)?;
                let high = recheck_field(&field)?;
                let again = symbol_once(&high, &ea, &eb, None)?;
                let agrees = again.value == run.value;
                precision.recheck = Some(high.work_prec());
                precision.recheck_agrees = Some(agrees);
                let concordant = run.value.is_trivial() == verdict.is_norm;
                if !concordant {
                    exit = EXIT_PROPERTY;
                } else if !agrees {
                    exit = EXIT_PRECISION;
                }
                json!({ "applicable": true, "c": run.value.c(), "concordant": concordant })
            }
        };
        Ok(Outcome {
            exit,
            report: Report {
                command: "oracle".into(),
                args: args.clone(),
                field: Some(FieldInfo::of(desc)),
                inputs: json!({ "alpha": verdict.alpha, "beta": verdict.beta }),
                outputs: json!({
                    "is_norm": verdict.is_norm,
                    "degenerate": verdict.degenerate,
                    "norm_subgroup_rank": verdict.rank,
                    "class_space_dim": oracle.space().dim(),
                    "classes_searched": oracle.space().candidates(),
                    "concordance": concordance,
                }),
                precision: Some(precision),
                status: if exit == EXIT_PASS { "pass" } else { "fail" },
                error: None,
            },
        })
    })();
    finish("oracle", args, desc, body)
}

/// Splits `"a, b"` into the two expressions of a form term `a db/b`.
pub fn parse_term(src: &str) -> Result<(Expr, Expr), Failure> {
    let parts: Vec<&str> = src.split(',').collect();
    if parts.len() != 2 {
        return Err(Failure::Usage(format!("form term {src:?} must read \"a, b\"")));
    }
    Ok((parse_expr(parts[0])?, parse_expr(parts[1])?))
}

struct ExpmapRun {
    expr: FormExpression,
    value: SymbolValue,
    per_term: Vec<SymbolValue>,
    coefficient: KElement,
    rewritten: Result<KElement, Error>,
}

fn expmap_once(field: &Field, eta: &Expr, terms: &[(Expr, Expr)]) -> Result<ExpmapRun, Failure> {
    let ctx = CyclotomicContext::new(field)?;
    let eta = eval(eta, field)?;
    let mut expr = FormExpression::new(field);
    let mut per_term = Vec::new();
    for (a, b) in terms {
        let (a, b) = (eval(a, field)?, eval(b, field)?);
        per_term.push(exp2_eval(&ctx, &eta, &FormExpression::single(a.clone(), b.clone())?)?);
        expr.push(a, b)?;
    }
    let value = exp2_eval(&ctx, &eta, &expr)?;
    let coefficient = expr.reduce()?.coefficient();
    let rewritten = rewrite_to_zeta(&ctx, &expr);
    Ok(ExpmapRun { expr, value, per_term, coefficient, rewritten })
}

/// Pairing image of `exp_eta(sum a_i db_i/b_i)`.
pub fn cmd_expmap(desc: &FieldDesc, eta: &str, terms: &[String]) -> Outcome {
    let args = json!({ "eta": eta, "terms": terms });
    let body = (|| {
        if terms.is_empty() {
            return Err(Failure::Usage("expmap needs at least one --term".into()));
        }
        let eeta = parse_expr(eta)?;
        let parsed = terms.iter().map(|t| parse_term(t)).collect::<Result<Vec<_>, _>>()?;
        let field = build_field(desc)?;
        let run = expmap_once(&field, &eeta, &parsed)?;
        let high = recheck_field(&field)?;
        let again = expmap_once(&high, &eeta, &parsed)?;
        let agrees = again.value == run.value;
        let rewritten = match &run.rewritten {
            Ok(a) => json!({ "a": a.to_string(), "b": "zeta" }),
            Err(e) => json!({ "reason": e.to_string() }),
        };
        let form: Vec<[String; 2]> = run.expr.terms().iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect();
        Ok(Outcome {
            exit: if agrees { EXIT_PASS } else { EXIT_PRECISION },
            report: Report {
                command: "expmap".into(),
                args: args.clone(),
                field: Some(FieldInfo::of(desc)),
                inputs: json!({ "eta": eval(&eeta, &field)?.to_string(), "form": form }),
                outputs: json!({
                    "symbol": run.value,
                    "per_term": run.per_term.iter().map(|s| s.c()).collect::<Vec<_>>(),
                    "dpi_coefficient": run.coefficient.to_string(),
                    "zeta_form": rewritten,
                }),
                precision: Some(PrecisionInfo {
                    working: field.work_prec(),
                    recheck: Some(high.work_prec()),
                    recheck_agrees: Some(agrees),
                }),
                status: if agrees { "pass" } else { "fail" },
                error: None,
            },
        })
    })();
    finish("expmap", args, desc, body)
}
