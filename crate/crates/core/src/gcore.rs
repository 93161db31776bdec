//! Degree bookkeeping and sign rules for graded objects.
//!
//! Everything downstream (products of odd generators, Jacobiators, the
//! shift between symmetric and antisymmetric brackets) reduces to the
//! functions in this module. Permutations act on positions: the sequence
//! `images = (τ(1), ..., τ(n))` describes the arrangement
//! `v_{τ(1)} ⊗ ... ⊗ v_{τ(n)}` of the inputs `v_1, ..., v_n`.

use std::fmt;
use std::ops::{Mul, MulAssign, Neg};

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};

/// Integer grading of homogeneous elements.
pub type Degree = i64;

/// `true` when the degree is odd.
#[inline]
pub fn is_odd(d: Degree) -> bool {
    d.rem_euclid(2) == 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// `(-1)^exponent`.
    pub fn from_exponent(exponent: i64) -> Sign {
        if is_odd(exponent) {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    /// Sign of swapping two homogeneous elements: `(-1)^{|a||b|}`.
    pub fn swap(a: Degree, b: Degree) -> Sign {
        if is_odd(a) && is_odd(b) {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn is_minus(self) -> bool {
        self == Sign::Minus
    }

    pub fn to_rational(self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.value()))
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl MulAssign for Sign {
    fn mul_assign(&mut self, rhs: Sign) {
        *self = *self * rhs;
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        self * Sign::Minus
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

/// A permutation of `{1, ..., n}`, stored zero-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    /// Builds a permutation from zero-based images, checking bijectivity.
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::InvalidPermutation(format!("{images:?}")));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation from the one-based notation `(τ(1), ..., τ(n))`.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::InvalidPermutation(format!("{images:?}")));
        }
        Self::new(images.iter().map(|&i| i - 1).collect())
    }

    /// The transposition exchanging positions `a` and `b` (zero-based).
    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        if a >= n || b >= n {
            return Err(Error::InvalidPermutation(format!(
                "transposition ({a} {b}) in S_{n}"
            )));
        }
        images.swap(a, b);
        Ok(Permutation { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// Zero-based images.
    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn image(&self, i: usize) -> usize {
        self.images[i]
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.len() != other.len() {
            return Err(Error::ArityMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(Permutation {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.len()];
        for (i, &t) in self.images.iter().enumerate() {
            images[t] = i;
        }
        Permutation { images }
    }

    /// `(-1)^τ`, computed from the inversion count.
    pub fn parity(&self) -> Sign {
        let mut inversions = 0i64;
        for s in 0..self.len() {
            for t in s + 1..self.len() {
                if self.images[s] > self.images[t] {
                    inversions += 1;
                }
            }
        }
        Sign::from_exponent(inversions)
    }

    /// Applies the permutation to a sequence: result[s] = items[τ(s)].
    pub fn arrange<T: Clone>(&self, items: &[T]) -> Vec<T> {
        self.images.iter().map(|&i| items[i].clone()).collect()
    }

    /// `true` when `τ(1) < ... < τ(j)` and `τ(j+1) < ... < τ(n)`.
    pub fn is_shuffle(&self, j: usize) -> bool {
        if j > self.len() {
            return false;
        }
        let (head, tail) = self.images.split_at(j);
        head.windows(2).all(|w| w[0] < w[1]) && tail.windows(2).all(|w| w[0] < w[1])
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, i) in self.images.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        f.write_str(")")
    }
}

/// Koszul sign `e(τ)`: `v_{τ(1)} ⋯ v_{τ(n)} = e(τ) v_1 ⋯ v_n` in the free
/// graded-commutative algebra. Every pair of inputs whose relative order is
/// reversed contributes `(-1)^{|a||b|}`.
pub fn koszul_sign(perm: &Permutation, degrees: &[Degree]) -> Result<Sign> {
    if perm.len() != degrees.len() {
        return Err(Error::ArityMismatch {
            expected: perm.len(),
            got: degrees.len(),
        });
    }
    let imgs = perm.images();
    let mut sign = Sign::Plus;
    for s in 0..imgs.len() {
        if !is_odd(degrees[imgs[s]]) {
            continue;
        }
        for t in s + 1..imgs.len() {
            if imgs[s] > imgs[t] && is_odd(degrees[imgs[t]]) {
                sign = -sign;
            }
        }
    }
    Ok(sign)
}

/// `(-1)^τ e(τ)`, the sign rule for graded antisymmetric maps.
pub fn antisym_sign(perm: &Permutation, degrees: &[Degree]) -> Result<Sign> {
    Ok(perm.parity() * koszul_sign(perm, degrees)?)
}

/// All `(j, n-j)`-shuffles, ordered lexicographically by the first block.
pub fn shuffles(j: usize, n: usize) -> Result<Vec<Permutation>> {
    if j > n {
        return Err(Error::ShuffleRange { j, n });
    }
    let mut out = Vec::new();
    let mut head: Vec<usize> = (0..j).collect();
    loop {
        let mut images = head.clone();
        images.extend((0..n).filter(|i| !head.contains(i)));
        out.push(Permutation { images });
        // next j-subset in lexicographic order
        let mut k = j;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            if head[k] < n - j + k {
                head[k] += 1;
                for m in k + 1..j {
                    head[m] = head[m - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Sign of the shift isomorphism `v_1[1] ⊗ ⋯ ⊗ v_k[1] ↦ ±(v_1 ⊗ ⋯ ⊗ v_k)`:
/// `(-1)^{Σ_i (k-i)|v_i|}` for unshifted degrees `|v_i|`.
pub fn shift_iso_sign(degrees: &[Degree]) -> Sign {
    let k = degrees.len() as i64;
    let exponent: i64 = degrees
        .iter()
        .enumerate()
        .map(|(i, &d)| (k - 1 - i as i64) * d.rem_euclid(2))
        .sum();
    Sign::from_exponent(exponent)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Sign from sorting the arrangement back into order by adjacent swaps.
    fn bubble_sign(perm: &Permutation, degrees: &[Degree]) -> Sign {
        let mut seq: Vec<usize> = perm.images().to_vec();
        let mut sign = Sign::Plus;
        loop {
            let mut swapped = false;
            for s in 0..seq.len().saturating_sub(1) {
                if seq[s] > seq[s + 1] {
                    sign *= Sign::swap(degrees[seq[s]], degrees[seq[s + 1]]);
                    seq.swap(s, s + 1);
                    swapped = true;
                }
            }
            if !swapped {
                return sign;
            }
        }
    }

    /// Same sign, via selection sort from the right (a different
    /// decomposition into adjacent transpositions).
    fn selection_sign(perm: &Permutation, degrees: &[Degree]) -> Sign {
        let mut seq: Vec<usize> = perm.images().to_vec();
        let mut sign = Sign::Plus;
        for target in (0..seq.len()).rev() {
            let mut pos = seq.iter().position(|&x| x == target).unwrap();
            while pos < target {
                sign *= Sign::swap(degrees[seq[pos]], degrees[seq[pos + 1]]);
                seq.swap(pos, pos + 1);
                pos += 1;
            }
        }
        sign
    }

    fn all_perms(n: usize) -> Vec<Permutation> {
        fn rec(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Permutation>) {
            if prefix.len() == n {
                out.push(Permutation::new(prefix.clone()).unwrap());
                return;
            }
            for i in 0..n {
                if !prefix.contains(&i) {
                    prefix.push(i);
                    rec(prefix, n, out);
                    prefix.pop();
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), n, &mut out);
        out
    }

    #[test]
    fn koszul_examples() {
        let id = Permutation::identity(3);
        assert_eq!(koszul_sign(&id, &[1, 3, 5]).unwrap(), Sign::Plus);
        let swap = Permutation::from_one_based(&[2, 1]).unwrap();
        assert_eq!(koszul_sign(&swap, &[1, 1]).unwrap(), Sign::Minus);

        let p = Permutation::from_one_based(&[2, 3, 1]).unwrap();
        let degs = [1, 1, 2];
        let expected = bubble_sign(&p, &degs);
        assert_eq!(expected, selection_sign(&p, &degs));
        // v2 v3 v1: v1 (odd) passes v3 (even) then v2 (odd)
        assert_eq!(expected, Sign::Minus);
        assert_eq!(koszul_sign(&p, &degs).unwrap(), expected);
    }

    #[test]
    fn koszul_arity_mismatch() {
        let p = Permutation::identity(2);
        assert_eq!(
            koszul_sign(&p, &[1]),
            Err(Error::ArityMismatch {
                expected: 2,
                got: 1
            })
        );
        assert!(antisym_sign(&p, &[1, 2, 3]).is_err());
    }

    #[test]
    fn antisym_examples() {
        let swap = Permutation::from_one_based(&[2, 1]).unwrap();
        assert_eq!(antisym_sign(&Permutation::identity(2), &[0, 1]).unwrap(), Sign::Plus);
        assert_eq!(antisym_sign(&swap, &[0, 0]).unwrap(), Sign::Minus);
        assert_eq!(antisym_sign(&swap, &[1, 1]).unwrap(), Sign::Plus);
    }

    #[test]
    fn koszul_matches_both_decompositions_on_s4() {
        let degree_sets = [[0, 0, 0, 0], [1, 1, 1, 1], [1, 2, 3, -1], [0, 1, -2, 1]];
        for degs in &degree_sets {
            for p in all_perms(4) {
                let k = koszul_sign(&p, degs).unwrap();
                assert_eq!(k, bubble_sign(&p, degs), "{p} {degs:?}");
                assert_eq!(k, selection_sign(&p, degs), "{p} {degs:?}");
            }
        }
    }

    #[test]
    fn koszul_cocycle_on_s4() {
        // e(τ∘σ; v) = e(τ; v) · e(σ; v∘τ)
        let degree_sets = [[1, 1, 0, 1], [1, 3, 2, 5], [-1, 0, 1, 2]];
        let perms = all_perms(4);
        for degs in &degree_sets {
            for t in &perms {
                let permuted = t.arrange(degs);
                for s in &perms {
                    let ts = t.compose(s).unwrap();
                    let lhs = koszul_sign(&ts, degs).unwrap();
                    let rhs = koszul_sign(t, degs).unwrap() * koszul_sign(s, &permuted).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn even_degrees_give_trivial_koszul() {
        for p in all_perms(4) {
            assert_eq!(koszul_sign(&p, &[0, 2, -4, 6]).unwrap(), Sign::Plus);
            assert_eq!(antisym_sign(&p, &[0, 2, -4, 6]).unwrap(), p.parity());
        }
    }

    #[test]
    fn shuffle_counts_and_order() {
        assert_eq!(shuffles(0, 4).unwrap(), vec![Permutation::identity(4)]);
        assert_eq!(shuffles(4, 4).unwrap(), vec![Permutation::identity(4)]);
        assert_eq!(shuffles(1, 3).unwrap().len(), 3);
        assert!(matches!(shuffles(3, 2), Err(Error::ShuffleRange { j: 3, n: 2 })));

        let brute: Vec<Permutation> = all_perms(4).into_iter().filter(|p| p.is_shuffle(2)).collect();
        let mut got = shuffles(2, 4).unwrap();
        assert_eq!(got.len(), 6);
        let first_blocks: Vec<Vec<usize>> = got.iter().map(|p| p.images()[..2].to_vec()).collect();
        let mut sorted = first_blocks.clone();
        sorted.sort();
        assert_eq!(first_blocks, sorted);
        got.sort();
        let mut brute_sorted = brute;
        brute_sorted.sort();
        assert_eq!(got, brute_sorted);
    }

    #[test]
    fn shuffles_have_no_duplicates() {
        for n in 0..7 {
            for j in 0..=n {
                let sh = shuffles(j, n).unwrap();
                let expected = (0..j).fold(1usize, |acc, i| acc * (n - i) / (i + 1));
                assert_eq!(sh.len(), expected);
                let mut dedup = sh.clone();
                dedup.sort();
                dedup.dedup();
                assert_eq!(dedup.len(), sh.len());
                assert!(sh.iter().all(|p| p.is_shuffle(j)));
            }
        }
    }

    #[test]
    fn shift_sign_examples() {
        assert_eq!(shift_iso_sign(&[7]), Sign::Plus);
        assert_eq!(shift_iso_sign(&[2, 4, -6]), Sign::Plus);
        assert_eq!(shift_iso_sign(&[1, 5]), Sign::Minus);
        // exponent 2·1 + 1·1 + 0 = 3
        assert_eq!(shift_iso_sign(&[1, 1, 1]), Sign::Minus);
    }

    #[test]
    fn invalid_permutations() {
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::from_one_based(&[0, 1]).is_err());
        assert!(Permutation::from_one_based(&[1, 3]).is_err());
    }
}
