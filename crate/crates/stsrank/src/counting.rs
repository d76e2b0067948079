//! Exact big-integer and rational evaluation of the closed-form counts and
//! bounds: distinct-system counts, classical counts, exact-rank counts,
//! group orders, automorphism bounds, and isomorphism-class bounds.
//!
//! No floating point anywhere; divisions the theory claims exact are
//! asserted exact.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{BigUint, Integer, One, Signed, ToPrimitive, Zero};

use crate::components::{catalog_count, ConstantKind};
use crate::error::{Error, Result};
use crate::field::CodeSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKind {
    Pgl,
    Agl,
}

pub fn factorial(k: usize) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// |PGL(d, 2)| = prod_{i<d} (2^d - 2^i); |AGL(d, 3)| = 3^d prod_{i<d} (3^d - 3^i).
pub fn group_order(kind: GroupKind, dim: usize, q: u8) -> Result<BigUint> {
    match (kind, q) {
        (GroupKind::Pgl, 2) | (GroupKind::Agl, 3) => {}
        _ => {
            return Err(Error::InvalidParameters(format!(
                "{kind:?} over GF({q}) is out of scope"
            )))
        }
    }
    if dim == 0 {
        return Err(Error::InvalidParameters("group dimension must be positive".into()));
    }
    let qq = BigUint::from(q);
    let qd = qq.pow(dim as u32);
    let mut order = BigUint::one();
    for i in 0..dim {
        order *= &qd - qq.pow(i as u32);
    }
    if kind == GroupKind::Agl {
        order *= qd;
    }
    Ok(order)
}

/// Order of the column-permutation group preserving the code: the wreath
/// part on zero columns and groups times the collineation group of the
/// quotient geometry.
pub fn aut_code_order(spec: &CodeSpec) -> BigUint {
    let t_param = spec.group_param();
    let m = spec.group_count();
    let d = (spec.n() - spec.t()) as usize;
    match spec.p() {
        2 => {
            factorial(t_param)
                * factorial(t_param + 1).pow(m as u32)
                * group_order(GroupKind::Pgl, d, 2).expect("in scope")
        }
        _ => {
            factorial(t_param).pow(m as u32) * group_order(GroupKind::Agl, d, 3).expect("in scope")
        }
    }
}

/// Upper bound U on |Aut S| for any STS contained in the code.
pub fn aut_sts_upper(spec: &CodeSpec) -> BigUint {
    let t_param = spec.group_param();
    let e = (spec.n() - spec.t() + 1) as u32;
    let d = (spec.n() - spec.t()) as usize;
    match spec.p() {
        2 => {
            factorial(t_param)
                * factorial(t_param + 1).pow(e)
                * group_order(GroupKind::Pgl, d, 2).expect("in scope")
        }
        _ => factorial(t_param).pow(e) * group_order(GroupKind::Agl, d, 3).expect("in scope"),
    }
}

/// Number of distinct STS contained in the code:
/// binary N_1(T)·(N_2(T+1)·T!)^M·N_3(T+1)^{M(M-1)/6},
/// ternary N_1(T)^M·N_3(T)^{M(M-1)/6}.
pub fn formula_distinct(spec: &CodeSpec) -> Result<BigUint> {
    let t_param = spec.group_param();
    let m = spec.group_count();
    let lines = m * (m - 1) / 6;
    let mut missing = Vec::new();
    let mut fetch = |kind: ConstantKind, order: usize| -> BigUint {
        match catalog_count(kind, order) {
            Ok(c) => c.value,
            Err(_) => {
                missing.push(format!("{kind:?}({order})"));
                BigUint::zero()
            }
        }
    };
    let value = match spec.p() {
        2 => {
            let n1 = fetch(ConstantKind::N1, t_param);
            let n2 = fetch(ConstantKind::N2, t_param + 1);
            let n3 = fetch(ConstantKind::N3, t_param + 1);
            n1 * (n2 * factorial(t_param)).pow(m as u32) * n3.pow(lines as u32)
        }
        _ => {
            let n1 = fetch(ConstantKind::N1, t_param);
            let n3 = fetch(ConstantKind::N3, t_param);
            n1.pow(m as u32) * n3.pow(lines as u32)
        }
    };
    if !missing.is_empty() {
        return Err(Error::UnknownConstant(format!(
            "missing constants: {}",
            missing.join(", ")
        )));
    }
    Ok(value)
}

/// Number of classical (minimum-rank) STS in the t = 1 code:
/// binary 2^{2^{n-1}-n}, ternary 6^{3^{n-1}}/(2·3^n).
pub fn formula_classical(p: u8, n: u32) -> Result<BigUint> {
    if !(p == 2 || p == 3) || n < 2 {
        return Err(Error::InvalidParameters(format!("no classical count for p={p}, n={n}")));
    }
    match p {
        2 => {
            let e = 2u64.pow(n - 1) - u64::from(n);
            Ok(BigUint::from(2u8).pow(e as u32))
        }
        _ => {
            let num = BigUint::from(6u8).pow(3u32.pow(n - 1));
            let den = BigUint::from(2u8) * BigUint::from(3u8).pow(n);
            let (q, r) = num.div_rem(&den);
            if !r.is_zero() {
                return Err(Error::Internal("classical count division not exact".into()));
            }
            Ok(q)
        }
    }
}

/// Distinct systems of exactly the t = 1 rank: total at t = 1 minus the
/// classical ones.
pub fn formula_exact_rank_t1(p: u8, n: u32) -> Result<BigUint> {
    let spec = CodeSpec::new(p, n, 1)?;
    let total = formula_distinct(&spec)?;
    let cl = formula_classical(p, n)?;
    if cl > total {
        return Err(Error::Internal("classical count exceeds total".into()));
    }
    Ok(total - cl)
}

/// Exact lower/upper bounds on the number of isomorphism classes of STS
/// contained in the code, with the raw rationals and their integerizations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundsReport {
    pub lower_rational: BigRational,
    pub upper_rational: BigRational,
    /// ceil(lower_rational)
    pub lower_int: BigUint,
    /// floor(upper_rational)
    pub upper_int: BigUint,
    /// echoed inputs
    pub distinct: BigUint,
    pub aut_code: BigUint,
    pub aut_sts_upper: BigUint,
}

fn to_int(b: &BigUint) -> BigInt {
    BigInt::from(b.clone())
}

fn ceil_rat(r: &BigRational) -> BigUint {
    r.ceil().to_integer().to_biguint().expect("bounds are nonnegative")
}

fn floor_rat(r: &BigRational) -> BigUint {
    r.floor().to_integer().to_biguint().expect("bounds are nonnegative")
}

/// Lower bound s/|Aut C| and upper bound s/(g!)^{M-n+t-1}, where g! is
/// (T+1)! in the binary case and T! in the ternary case.
pub fn iso_bounds(spec: &CodeSpec) -> Result<BoundsReport> {
    let s = formula_distinct(spec)?;
    let aut_c = aut_code_order(spec);
    let u_bound = aut_sts_upper(spec);
    let lower = BigRational::new(to_int(&s), to_int(&aut_c));
    let g_fact = match spec.p() {
        2 => factorial(spec.group_param() + 1),
        _ => factorial(spec.group_param()),
    };
    let e = spec.group_count() as i64 - i64::from(spec.n()) + i64::from(spec.t()) - 1;
    if e < 0 {
        return Err(Error::Internal("negative cancellation exponent".into()));
    }
    let upper = BigRational::new(to_int(&s), to_int(&g_fact.pow(e as u32)));
    Ok(BoundsReport {
        lower_int: ceil_rat(&lower),
        upper_int: floor_rat(&upper),
        lower_rational: lower,
        upper_rational: upper,
        distinct: s,
        aut_code: aut_c,
        aut_sts_upper: u_bound,
    })
}

/// Lower bound on the number of isomorphism classes of exact rank
/// 2^n-1-n+t resp. 3^n-1-n+t.
///
/// t = 1 basic: ceil(s/|Aut C|) - 1 (at least one class is classical).
/// t = 1 refined: ceil((s - cl)/|Aut C|).
/// t >= 2: lower(t) - upper(t-1), floored at 0; `refined` is rejected.
pub fn iso_bounds_exact_rank(spec: &CodeSpec, refined: bool) -> Result<BigUint> {
    if spec.t() == 1 {
        let b = iso_bounds(spec)?;
        if refined {
            let cl = formula_classical(spec.p(), spec.n())?;
            let num = to_int(&b.distinct) - to_int(&cl);
            let r = BigRational::new(num, to_int(&b.aut_code));
            if r.is_negative() {
                return Ok(BigUint::zero());
            }
            return Ok(ceil_rat(&r));
        }
        let one = BigUint::one();
        return Ok(if b.lower_int.is_zero() { BigUint::zero() } else { b.lower_int - one });
    }
    if refined {
        return Err(Error::InvalidParameters(
            "refined exact-rank bound only exists at t = 1".into(),
        ));
    }
    let lower = iso_bounds(spec)?.lower_int;
    let prev = CodeSpec::new(spec.p(), spec.n(), spec.t() - 1)?;
    let upper_prev = iso_bounds(&prev)?.upper_int;
    if upper_prev >= lower {
        return Ok(BigUint::zero());
    }
    Ok(lower - upper_prev)
}

/// Convenience: exact u64 view of a big count when it fits.
pub fn as_u64(b: &BigUint) -> Option<u64> {
    b.to_u64()
}
