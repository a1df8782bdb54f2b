use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::ring::{CohClass, CohomRing};
use crate::error::{Error, Result};
use crate::partitions::{reorder_sign, OrderedSetPartition};
use crate::scalars::GaussRat;

/// A class on `X^r` written in the Künneth basis: a sum of tensor words of
/// basis indices with coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TensorClass {
    ring: u64,
    arity: usize,
    terms: BTreeMap<Vec<usize>, GaussRat>,
}

fn parity_sign(odd: bool) -> GaussRat {
    GaussRat::from_int(if odd { -1 } else { 1 })
}

impl TensorClass {
    pub fn zero(ring: &CohomRing, arity: usize) -> TensorClass {
        TensorClass {
            ring: ring.id(),
            arity,
            terms: BTreeMap::new(),
        }
    }

    /// `x1 ⊗ … ⊗ xr`, expanded multilinearly.
    pub fn from_factors(ring: &CohomRing, factors: &[CohClass]) -> Result<TensorClass> {
        let mut out = TensorClass::zero(ring, 0);
        out.terms.insert(Vec::new(), GaussRat::one());
        for f in factors {
            if f.ring_id() != ring.id() {
                return Err(Error::RingMismatch);
            }
            let mut next = TensorClass::zero(ring, out.arity + 1);
            for (w, c) in &out.terms {
                for (i, x) in f.support() {
                    let mut w2 = w.clone();
                    w2.push(i);
                    next.add_word(w2, &(c * x));
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// A single word of basis elements with coefficient `c`.
    pub fn word(ring: &CohomRing, word: Vec<usize>, c: GaussRat) -> TensorClass {
        let mut out = TensorClass::zero(ring, word.len());
        out.add_word(word, &c);
        out
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &GaussRat)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_word(&mut self, word: Vec<usize>, c: &GaussRat) {
        debug_assert_eq!(word.len(), self.arity);
        if c.is_zero() {
            return;
        }
        let slot = self
            .terms
            .entry(word.clone())
            .or_insert_with(GaussRat::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&word);
        }
    }

    fn same(&self, other: &TensorClass) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: other.arity,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &TensorClass) -> Result<TensorClass> {
        self.same(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_word(w.clone(), c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &GaussRat) -> TensorClass {
        let mut out = TensorClass {
            ring: self.ring,
            arity: self.arity,
            terms: BTreeMap::new(),
        };
        for (w, x) in &self.terms {
            out.add_word(w.clone(), &(x * c));
        }
        out
    }

    /// Factorwise product with the Koszul rule
    /// `(x1⊗x2)·(y1⊗y2) = (−1)^{|x2||y1|} (x1y1)⊗(x2y2)`.
    pub fn mul(&self, ring: &CohomRing, other: &TensorClass) -> Result<TensorClass> {
        self.same(other)?;
        let mut out = TensorClass::zero(ring, self.arity);
        for (x, cx) in &self.terms {
            for (y, cy) in &other.terms {
                // moving y_j to the left past x_i for every i > j
                let mut odd_swaps = 0;
                for j in 0..self.arity {
                    if !ring.is_odd(y[j]) {
                        continue;
                    }
                    odd_swaps += x[j + 1..].iter().filter(|&&i| ring.is_odd(i)).count();
                }
                let mut acc: Vec<(Vec<usize>, GaussRat)> = vec![(Vec::new(), cx * cy)];
                for j in 0..self.arity {
                    let prod = ring.basis_product(x[j], y[j]);
                    let mut next = Vec::new();
                    for (w, c) in &acc {
                        for (k, v) in prod.iter().enumerate() {
                            if !v.is_zero() {
                                let mut w2 = w.clone();
                                w2.push(k);
                                next.push((w2, c * v));
                            }
                        }
                    }
                    acc = next;
                }
                let s = parity_sign(odd_swaps % 2 == 1);
                for (w, c) in acc {
                    out.add_word(w, &(&c * &s));
                }
            }
        }
        Ok(out)
    }

    /// Concatenation `self ⊗ other`, no sign.
    pub fn tensor(&self, other: &TensorClass) -> Result<TensorClass> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        let mut out = TensorClass {
            ring: self.ring,
            arity: self.arity + other.arity,
            terms: BTreeMap::new(),
        };
        for (x, cx) in &self.terms {
            for (y, cy) in &other.terms {
                let mut w = x.clone();
                w.extend_from_slice(y);
                out.add_word(w, &(cx * cy));
            }
        }
        Ok(out)
    }

    /// Reorders factors so the new `j`-th factor is the old `order[j]`,
    /// with Koszul signs.
    pub fn permute(&self, ring: &CohomRing, order: &[usize]) -> Result<TensorClass> {
        if order.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: order.len(),
            });
        }
        let mut out = TensorClass::zero(ring, self.arity);
        for (w, c) in &self.terms {
            let odd: Vec<bool> = w.iter().map(|&i| ring.is_odd(i)).collect();
            let s = reorder_sign(order, &odd);
            let w2: Vec<usize> = order.iter().map(|&j| w[j]).collect();
            out.add_word(w2, &c.scale_int(s as i64));
        }
        Ok(out)
    }

    /// Swaps factors `i` and `i+1`.
    pub fn transpose(&self, ring: &CohomRing, i: usize) -> Result<TensorClass> {
        let mut order: Vec<usize> = (0..self.arity).collect();
        if i + 1 >= self.arity {
            return Err(Error::IndexOutOfRange {
                index: i + 2,
                len: self.arity,
            });
        }
        order.swap(i, i + 1);
        self.permute(ring, &order)
    }

    /// `Π ∫ factor`, summed over words.
    pub fn integrate(&self, ring: &CohomRing) -> GaussRat {
        let mut total = GaussRat::zero();
        for (w, c) in &self.terms {
            let mut v = c.clone();
            for &i in w {
                v = &v * ring.integral_of_basis(i);
                if v.is_zero() {
                    break;
                }
            }
            total += &v;
        }
        total
    }

    /// Pulls back along the block permutation `θ_P`, restricts to the
    /// product of block diagonals by cupping each block's factors, and
    /// returns one factor per block, in block order.
    pub fn diagonal_restrict(
        &self,
        ring: &CohomRing,
        p: &OrderedSetPartition,
    ) -> Result<TensorClass> {
        if p.ground_size() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: p.ground_size(),
            });
        }
        let permuted = self.permute(ring, &p.theta())?;
        let sizes: Vec<usize> = p.blocks().iter().map(Vec::len).collect();
        let mut out = TensorClass::zero(ring, p.len());
        for (w, c) in &permuted.terms {
            let mut factors = Vec::with_capacity(sizes.len());
            let mut at = 0;
            for &s in &sizes {
                let mut f = ring.basis(w[at]);
                for &i in &w[at + 1..at + s] {
                    f = ring.cup(&f, &ring.basis(i))?;
                }
                factors.push(f);
                at += s;
            }
            let t = TensorClass::from_factors(ring, &factors)?;
            out = out.add(&t.scale(c))?;
        }
        Ok(out)
    }

    /// Pushes each factor forward along a small diagonal: factor `k` fans out
    /// to `fans[k]` factors. Even codimension, so no signs arise.
    pub fn push_diagonals(&self, ring: &CohomRing, fans: &[usize]) -> Result<TensorClass> {
        if fans.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: fans.len(),
            });
        }
        let total = fans.iter().sum();
        let mut out = TensorClass::zero(ring, total);
        for (w, c) in &self.terms {
            let mut acc = TensorClass::word(ring, Vec::new(), c.clone());
            for (k, &i) in w.iter().enumerate() {
                acc = acc.tensor(&small_diagonal_push(ring, &ring.basis(i), fans[k])?)?;
            }
            out = out.add(&acc)?;
        }
        Ok(out)
    }
}

/// `ι_{Δ*}(γ)` on `X^ℓ` for the small diagonal `X → X^ℓ`:
/// `Δ_{ℓ*}(γ) = Σ_a (−1)^{|b_a|} Δ_{ℓ−1*}(γ·b_a) ⊗ b^a` with `b^a` the right dual.
pub fn small_diagonal_push(ring: &CohomRing, gamma: &CohClass, l: usize) -> Result<TensorClass> {
    if gamma.ring_id() != ring.id() {
        return Err(Error::RingMismatch);
    }
    match l {
        0 => Err(Error::InvalidInput(
            "small diagonal needs at least one factor".into(),
        )),
        1 => TensorClass::from_factors(ring, std::slice::from_ref(gamma)),
        _ => {
            let mut out = TensorClass::zero(ring, l);
            for a in 0..ring.rank() {
                let inner = ring.cup(gamma, &ring.basis(a))?;
                if inner.is_zero() {
                    continue;
                }
                let head = small_diagonal_push(ring, &inner, l - 1)?;
                let tail = TensorClass::from_factors(ring, &[ring.dual(a)])?;
                let term = head.tensor(&tail)?.scale(&parity_sign(ring.is_odd(a)));
                out = out.add(&term)?;
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(r: &CohomRing, n: &str) -> usize {
        r.index_of(n).unwrap()
    }

    #[test]
    fn diagonal_of_p3() {
        let r = CohomRing::projective3();
        let d = small_diagonal_push(&r, &r.unit(), 2).unwrap();
        let names = ["one", "h", "h2", "h3"];
        let mut expect = TensorClass::zero(&r, 2);
        for i in 0..4 {
            expect.add_word(
                vec![idx(&r, names[i]), idx(&r, names[3 - i])],
                &GaussRat::one(),
            );
        }
        assert_eq!(d, expect);
        assert!(d.integrate(&r).is_zero());
        let top = r.basis(idx(&r, "h3"));
        let d = small_diagonal_push(&r, &top, 2).unwrap();
        assert_eq!(
            d,
            TensorClass::word(&r, vec![idx(&r, "h3"); 2], GaussRat::one())
        );
    }

    #[test]
    fn projection_formula() {
        for r in [CohomRing::projective3(), CohomRing::odd_test()] {
            for g in 0..r.rank() {
                let d = small_diagonal_push(&r, &r.basis(g), 2).unwrap();
                for a in 0..r.rank() {
                    for b in 0..r.rank() {
                        let ab = TensorClass::word(&r, vec![a, b], GaussRat::one());
                        let lhs = d.mul(&r, &ab).unwrap().integrate(&r);
                        let gab = r
                            .cup(&r.cup(&r.basis(g), &r.basis(a)).unwrap(), &r.basis(b))
                            .unwrap();
                        assert_eq!(lhs, r.integrate(&gab).unwrap(), "g={g} a={a} b={b}");
                    }
                }
            }
        }
    }

    #[test]
    fn push_then_restrict_gives_euler_powers() {
        for r in [CohomRing::projective3(), CohomRing::odd_test()] {
            let e = r.euler_class();
            for g in 0..r.rank() {
                for l in 1..=3 {
                    let d = small_diagonal_push(&r, &r.basis(g), l).unwrap();
                    let back = d
                        .diagonal_restrict(&r, &OrderedSetPartition::from_sizes(&[l]).unwrap())
                        .unwrap();
                    let mut want = r.basis(g);
                    for _ in 1..l {
                        want = r.cup(&want, &e).unwrap();
                    }
                    assert_eq!(back, TensorClass::from_factors(&r, &[want]).unwrap());
                }
            }
        }
    }

    #[test]
    fn restrict_three_letters() {
        let r = CohomRing::odd_test();
        let (a, b, h) = (idx(&r, "a"), idx(&r, "b"), idx(&r, "h"));
        // a ⊗ b ⊗ h with S1 = {2}, S2 = {1,3}: b moves past a, sign −1
        let w = TensorClass::word(&r, vec![a, b, h], GaussRat::one());
        let p = OrderedSetPartition::parse("{{2},{1,3}}").unwrap();
        let got = w.diagonal_restrict(&r, &p).unwrap();
        let ah = r.cup(&r.basis(a), &r.basis(h)).unwrap();
        let want = TensorClass::from_factors(&r, &[r.basis(b), ah])
            .unwrap()
            .scale(&GaussRat::from_int(-1));
        assert_eq!(got, want);
        let single = OrderedSetPartition::from_sizes(&[1, 1, 1]).unwrap();
        assert_eq!(w.diagonal_restrict(&r, &single).unwrap(), w);
    }

    #[test]
    fn transpose_twice_is_identity() {
        let r = CohomRing::odd_test();
        let (a, b) = (idx(&r, "a"), idx(&r, "b"));
        let w = TensorClass::word(&r, vec![a, b], GaussRat::one());
        let t = w.transpose(&r, 0).unwrap();
        assert_eq!(t, TensorClass::word(&r, vec![b, a], GaussRat::from_int(-1)));
        assert_eq!(t.transpose(&r, 0).unwrap(), w);
    }
}
