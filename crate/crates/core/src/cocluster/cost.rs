//! Pairwise merge costs: directed and J-symmetrized KL divergence between
//! cluster prototypes, the size-based merge cost derived from the change in
//! relative partition entropy, and their product.

use crate::error::{Error, Result};
use crate::metrics::check_distribution;
use crate::scalar::Scalar;

/// Stand-in for a zero probability in the second argument of KL, so support
/// mismatches cost `a log2(a / 1e-12)` instead of infinity.
pub const KL_ZERO_FLOOR: f64 = 1e-12;

/// Lower bound applied to the size-based merge cost.
pub const MERGE_COST_FLOOR: f64 = 1e-12;

/// `log2(x)` with zero replaced by [`KL_ZERO_FLOOR`]. Multiplying the result
/// by a zero probability gives zero, which is exactly the `0 log 0`
/// convention, so KL reduces to `Σ a (log_floor a - log_floor b)`.
#[inline]
pub(crate) fn log2_floor<T: Scalar>(x: T) -> T {
    if x > T::zero() {
        x.log2()
    } else {
        T::lit(KL_ZERO_FLOOR).log2()
    }
}

/// One coordinate of `KL(A || B)`.
#[inline]
pub(crate) fn kl_term<T: Scalar>(a: T, b: T) -> T {
    if a > T::zero() {
        a * (a.log2() - log2_floor(b))
    } else {
        T::zero()
    }
}

/// `Σ a_i log2(a_i / b_i)`.
pub fn kl_divergence<T: Scalar>(a: &[T], b: &[T]) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "KL between distributions of lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    check_distribution(a)?;
    check_distribution(b)?;
    Ok(a.iter().zip(b).map(|(&x, &y)| kl_term(x, y)).sum())
}

/// `(1 - α) KL(A || B) + α KL(B || A)`.
pub fn kl_j_symmetrized<T: Scalar>(a: &[T], b: &[T], alpha: T) -> Result<T> {
    check_alpha(alpha)?;
    let ab = kl_divergence(a, b)?;
    let ba = kl_divergence(b, a)?;
    Ok(blend(ab, ba, alpha))
}

#[inline]
pub(crate) fn blend<T: Scalar>(ab: T, ba: T, alpha: T) -> T {
    (T::one() - alpha) * ab + alpha * ba
}

pub(crate) fn check_alpha<T: Scalar>(alpha: T) -> Result<()> {
    if alpha >= T::zero() && alpha <= T::one() {
        Ok(())
    } else {
        Err(Error::invalid(format!("balance factor {alpha} outside [0, 1]")))
    }
}

/// Change of `KL(A || B)` when coordinates `i` and `j` of both
/// distributions are summed into one.
#[inline]
pub fn kl_merge_delta<T: Scalar>(a_i: T, a_j: T, b_i: T, b_j: T) -> T {
    kl_term(a_i + a_j, b_i + b_j) - kl_term(a_i, b_i) - kl_term(a_j, b_j)
}

/// Unfloored `-Δ(p_i, p_j; k)`:
/// `-[(p_i log p_i + p_j log p_j) / log k - (p_i + p_j) log(p_i + p_j) / log(k - 1)]`.
pub(crate) fn merge_size_cost_raw<T: Scalar>(p_i: T, p_j: T, k: usize) -> Result<T> {
    if k < 3 {
        return Err(Error::SizeCostUndefined(k));
    }
    let log_k = T::from_count(k).log2();
    let log_k1 = T::from_count(k - 1).log2();
    Ok(size_cost_from_terms(p_i.xlog2x() + p_j.xlog2x(), (p_i + p_j).xlog2x(), log_k, log_k1))
}

#[inline]
pub(crate) fn size_cost_from_terms<T: Scalar>(separate: T, joined: T, log_k: T, log_k1: T) -> T {
    -(separate / log_k - joined / log_k1)
}

/// Size-based merge cost of two clusters with size probabilities `p_i` and
/// `p_j` among `k` clusters, floored at [`MERGE_COST_FLOOR`]. Undefined for
/// `k < 3`.
pub fn merge_size_cost<T: Scalar>(p_i: T, p_j: T, k: usize) -> Result<T> {
    let one = T::one();
    if !(p_i > T::zero() && p_j > T::zero() && p_i <= one && p_j <= one)
        || p_i + p_j > one + T::lit(1e-12)
    {
        return Err(Error::invalid(format!(
            "cluster probabilities ({p_i}, {p_j}) are not valid"
        )));
    }
    Ok(merge_size_cost_raw(p_i, p_j, k)?.max(T::lit(MERGE_COST_FLOOR)))
}

/// `D* = D × Merge`.
#[inline]
pub fn composite_cost<T: Scalar>(kl_j: T, merge: T) -> T {
    kl_j * merge
}
