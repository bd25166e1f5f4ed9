use super::SequenceExpr;
use crate::dd::Dd;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("sequence index must be at least 1, got {0}")]
    ZeroIndex(u64),
    #[error("not a positive sequence at n={n}: value {value}")]
    NotPositive { n: u64, value: f64 },
    #[error("division by zero in '{node}' at n={n}")]
    DivisionByZero { node: String, n: u64 },
    #[error("ln of a nonpositive argument in '{node}' at n={n}")]
    LnDomain { node: String, n: u64 },
    #[error("power with negative base and non-integer exponent in '{node}' at n={n}")]
    PowDomain { node: String, n: u64 },
    #[error("non-finite value in '{node}' at n={n}")]
    NonFinite { node: String, n: u64 },
}

/// Largest exponent evaluated by repeated squaring instead of `exp(y ln x)`.
const MAX_INTEGER_EXPONENT: f64 = (1u64 << 31) as f64;

fn eval_node(e: &SequenceExpr, n: u64, nv: Dd) -> Result<Dd, EvalError> {
    use SequenceExpr::*;
    let value = match e {
        Number(lit) => lit.value(),
        Var => nv,
        Neg(a) => -eval_node(a, n, nv)?,
        Add(a, b) => eval_node(a, n, nv)? + eval_node(b, n, nv)?,
        Sub(a, b) => eval_node(a, n, nv)? - eval_node(b, n, nv)?,
        Mul(a, b) => eval_node(a, n, nv)? * eval_node(b, n, nv)?,
        Div(a, b) => {
            let num = eval_node(a, n, nv)?;
            let den = eval_node(b, n, nv)?;
            if den.is_zero() {
                return Err(EvalError::DivisionByZero { node: e.to_string(), n });
            }
            num / den
        }
        Ln(a) => {
            let x = eval_node(a, n, nv)?;
            if x.is_zero() || x.is_sign_negative() {
                return Err(EvalError::LnDomain { node: e.to_string(), n });
            }
            x.ln()
        }
        Pow(a, b) => {
            let base = eval_node(a, n, nv)?;
            let exp = eval_node(b, n, nv)?;
            if exp.is_integer() && exp.hi().abs() < MAX_INTEGER_EXPONENT {
                if base.is_zero() && exp.is_sign_negative() {
                    return Err(EvalError::DivisionByZero { node: e.to_string(), n });
                }
                base.powi(exp.to_f64() as i64)
            } else if base.is_zero() {
                if exp.is_sign_negative() {
                    return Err(EvalError::DivisionByZero { node: e.to_string(), n });
                }
                Dd::ZERO
            } else if base.is_sign_negative() {
                return Err(EvalError::PowDomain { node: e.to_string(), n });
            } else {
                base.powf(exp)
            }
        }
    };
    if !value.is_finite() {
        return Err(EvalError::NonFinite { node: e.to_string(), n });
    }
    Ok(value)
}

/// Evaluates `b_n`; the result is finite and strictly positive or an error.
pub fn eval_sequence(expr: &SequenceExpr, n: u64) -> Result<Dd, EvalError> {
    if n == 0 {
        return Err(EvalError::ZeroIndex(n));
    }
    let v = eval_node(expr, n, Dd::from_u64(n))?;
    if v.is_zero() || v.is_sign_negative() {
        return Err(EvalError::NotPositive { n, value: v.to_f64() });
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_sequence;

    fn ev(s: &str, n: u64) -> Result<Dd, EvalError> {
        eval_sequence(&parse_sequence(s).unwrap(), n)
    }

    #[test]
    fn simple_values() {
        assert_eq!(ev("n", 7).unwrap(), Dd::from(7.0));
        assert_eq!(ev("1/(n^2)", 4).unwrap(), Dd::from(0.0625));
        assert_eq!(ev("2^-2", 1).unwrap(), Dd::from(0.25));
        assert_eq!(ev("(0-2)^2", 1).unwrap(), Dd::from(4.0));
    }

    #[test]
    fn fractional_power_of_log() {
        let v = ev("1/(n*ln(n)^1.5)", 10).unwrap().to_f64();
        let want = 1.0 / (10.0 * 10f64.ln().powf(1.5));
        assert!((v / want - 1.0).abs() < 1e-14);
        assert!((v - 0.02862).abs() < 1e-5);
    }

    #[test]
    fn division_by_ln_one() {
        assert_eq!(ev("ln(n)", 2).unwrap(), Dd::from(2.0).ln());
        assert!(matches!(ev("ln(n)", 1), Err(EvalError::NotPositive { n: 1, .. })));
        match ev("1/ln(n)", 1) {
            Err(EvalError::DivisionByZero { node, n }) => {
                assert_eq!(n, 1);
                assert_eq!(node, "1/ln(n)");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn domain_errors_name_the_node() {
        match ev("1 + ln(1 - n)", 3) {
            Err(EvalError::LnDomain { node, n: 3 }) => assert_eq!(node, "ln(1 - n)"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(ev("(1 - n)^0.5", 3), Err(EvalError::PowDomain { .. })));
        assert!(matches!(ev("(n - 1)^-1", 1), Err(EvalError::DivisionByZero { .. })));
        assert!(matches!(ev("n^1000", 1000), Err(EvalError::NonFinite { .. })));
        assert!(matches!(ev("1 - n", 3), Err(EvalError::NotPositive { n: 3, .. })));
        assert!(matches!(ev("n", 0), Err(EvalError::ZeroIndex(0))));
    }
}
