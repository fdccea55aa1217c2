//! The finite group `Z^m / W Z^m` of residues modulo the column lattice of an
//! invertible integer matrix `W`.
//!
//! Elements are represented canonically by their lift into the half-open
//! fundamental parallelepiped `{W λ : λ ∈ [0,1)^m} ∩ Z^m`. Alongside the
//! lift each element carries its Smith coordinates in `⊕ Z/d_j`, which make
//! hashing and the subgroup closures cheap.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{cap_exceeded, Error, Result};
use crate::linalg::{self, Lattice};
use crate::matrix::IntegerMatrix;

pub const DEFAULT_GROUP_CAP: u64 = 1_000_000;

/// An element of `G_W(Z^m)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    /// Canonical lift in the fundamental parallelepiped of `W`.
    pub vec: Vec<BigInt>,
    /// Class in `⊕ Z/d_j` (Smith coordinates).
    pub coords: Vec<BigInt>,
}

impl GroupElement {
    pub fn is_zero(&self) -> bool {
        self.vec.iter().all(Zero::is_zero)
    }
}

#[derive(Clone, Debug)]
pub struct ResidueGroup {
    w: IntegerMatrix,
    order: BigInt,
    /// `sign(det W) · adj(W)`, so that `W⁻¹ = adj_signed / order`.
    adj_signed: IntegerMatrix,
    snf_diag: Vec<BigInt>,
    snf_left: IntegerMatrix,
    snf_left_inv: IntegerMatrix,
}

impl ResidueGroup {
    pub fn new(w: &IntegerMatrix) -> Result<Self> {
        let (d, adj) = linalg::adjugate(w)?;
        if d.is_zero() {
            return Err(Error::Singular);
        }
        let sign = if d.is_negative() { -BigInt::one() } else { BigInt::one() };
        let smith = linalg::smith(w)?;
        let (ld, ladj) = linalg::adjugate(&smith.left)?;
        debug_assert!(ld.abs().is_one());
        Ok(ResidueGroup {
            w: w.clone(),
            order: d.abs(),
            adj_signed: adj.scaled(&sign),
            snf_diag: smith.diagonal,
            snf_left: smith.left,
            snf_left_inv: ladj.scaled(&ld),
        })
    }

    pub fn matrix(&self) -> &IntegerMatrix {
        &self.w
    }

    pub fn dim(&self) -> usize {
        self.w.rows()
    }

    /// `|det W|`.
    pub fn order(&self) -> &BigInt {
        &self.order
    }

    /// Invariant factors `d_1 | d_2 | … | d_m`.
    pub fn snf_diag(&self) -> &[BigInt] {
        &self.snf_diag
    }

    /// `|det W| · W⁻¹ b`, i.e. the basis coordinates of `b` scaled to integers.
    pub fn scaled_coordinates(&self, b: &[BigInt]) -> Vec<BigInt> {
        self.adj_signed.mul_vec(b).expect("dimension checked by caller")
    }

    fn check_dim(&self, b: &[BigInt]) -> Result<()> {
        if b.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: b.len(),
            });
        }
        Ok(())
    }

    /// Smith coordinates of an arbitrary integer vector.
    pub fn class_of(&self, b: &[BigInt]) -> Vec<BigInt> {
        self.snf_left
            .mul_vec(b)
            .expect("dimension checked by caller")
            .iter()
            .zip(&self.snf_diag)
            .map(|(v, d)| v.mod_floor(d))
            .collect()
    }

    fn lift_vec(&self, b: &[BigInt]) -> Vec<BigInt> {
        let frac: Vec<BigInt> = self
            .scaled_coordinates(b)
            .iter()
            .map(|v| v.mod_floor(&self.order))
            .collect();
        self.w
            .mul_vec(&frac)
            .expect("square")
            .into_iter()
            .map(|v| {
                let (q, r) = v.div_rem(&self.order);
                debug_assert!(r.is_zero());
                q
            })
            .collect()
    }

    /// The unique representative of `b + W Z^m` in the fundamental
    /// parallelepiped, computed as `W · frac(W⁻¹ b)`.
    pub fn residue(&self, b: &[BigInt]) -> Result<GroupElement> {
        self.check_dim(b)?;
        Ok(GroupElement {
            vec: self.lift_vec(b),
            coords: self.class_of(b),
        })
    }

    /// Element with the given Smith coordinates.
    pub fn element_from_class(&self, coords: &[BigInt]) -> GroupElement {
        let b = self.snf_left_inv.mul_vec(coords).expect("square");
        GroupElement {
            vec: self.lift_vec(&b),
            coords: coords.to_vec(),
        }
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement {
            vec: vec![BigInt::zero(); self.dim()],
            coords: vec![BigInt::zero(); self.dim()],
        }
    }

    /// Whether `g` is a canonical element of this group.
    pub fn is_member(&self, g: &GroupElement) -> bool {
        g.vec.len() == self.dim()
            && g.coords.len() == self.dim()
            && self
                .scaled_coordinates(&g.vec)
                .iter()
                .all(|v| !v.is_negative() && *v < self.order)
            && self.class_of(&g.vec) == g.coords
    }

    pub fn add(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        if !self.is_member(g) || !self.is_member(h) {
            return Err(Error::GroupMismatch);
        }
        let sum: Vec<BigInt> = g.vec.iter().zip(&h.vec).map(|(a, b)| a + b).collect();
        self.residue(&sum)
    }

    /// Every element of the group, in mixed-radix order of Smith coordinates.
    pub fn enumerate(&self, cap: u64) -> Result<Vec<GroupElement>> {
        if self.order > BigInt::from(cap) {
            return Err(cap_exceeded("group order", &self.order, cap));
        }
        let radix: Vec<u64> = self
            .snf_diag
            .iter()
            .map(|d| d.to_u64().expect("bounded by cap"))
            .collect();
        let total = self.order.to_u64().expect("bounded by cap");
        let mut out = Vec::with_capacity(total as usize);
        let mut digits = vec![0u64; radix.len()];
        for _ in 0..total {
            let coords: Vec<BigInt> = digits.iter().map(|&d| BigInt::from(d)).collect();
            out.push(self.element_from_class(&coords));
            for (d, r) in digits.iter_mut().zip(&radix).rev() {
                *d += 1;
                if *d < *r {
                    break;
                }
                *d = 0;
            }
        }
        Ok(out)
    }

    /// Whether `g` lies in the subgroup generated by the residues of
    /// `generators`, decided as lattice membership of `g` in
    /// `lattice(generators ∪ W)`.
    pub fn subgroup_contains(&self, generators: &[Vec<BigInt>], g: &GroupElement) -> Result<bool> {
        self.check_dim(&g.vec)?;
        for v in generators {
            self.check_dim(v)?;
        }
        Ok(self.subgroup_lattice(generators)?.contains(&g.vec))
    }

    /// `lattice(generators ∪ W)`; its points are exactly the vectors whose
    /// residue lies in the generated subgroup.
    pub fn subgroup_lattice(&self, generators: &[Vec<BigInt>]) -> Result<Lattice> {
        let mut cols = generators.to_vec();
        cols.extend(self.w.columns());
        Lattice::from_generators(self.dim(), &cols)
    }

    /// Breadth-first closure of the generators' residues from `0`. Every
    /// element of the generated subgroup is reached with a nonnegative
    /// coefficient vector `p`, and `residue(Σ p_ℓ generator_ℓ)` equals the key.
    pub fn nonneg_reach(
        &self,
        generators: &[Vec<BigInt>],
        cap: u64,
    ) -> Result<BTreeMap<GroupElement, Vec<BigInt>>> {
        for v in generators {
            self.check_dim(v)?;
        }
        if self.order > BigInt::from(cap) {
            return Err(cap_exceeded("group order", &self.order, cap));
        }
        let steps: Vec<Vec<BigInt>> = generators.iter().map(|v| self.class_of(v)).collect();
        let zero = vec![BigInt::zero(); self.dim()];
        let mut seen: HashMap<Vec<BigInt>, Vec<u64>> = HashMap::new();
        let mut order_found = vec![zero.clone()];
        seen.insert(zero.clone(), vec![0; generators.len()]);
        let mut queue = VecDeque::from([zero]);
        while let Some(c) = queue.pop_front() {
            let p = seen[&c].clone();
            for (l, step) in steps.iter().enumerate() {
                let next: Vec<BigInt> = c
                    .iter()
                    .zip(step)
                    .zip(&self.snf_diag)
                    .map(|((a, b), d)| (a + b).mod_floor(d))
                    .collect();
                if seen.contains_key(&next) {
                    continue;
                }
                let mut q = p.clone();
                q[l] += 1;
                seen.insert(next.clone(), q);
                order_found.push(next.clone());
                queue.push_back(next);
            }
        }
        Ok(order_found
            .into_iter()
            .map(|c| {
                let p = seen[&c].iter().map(|&v| BigInt::from(v)).collect();
                (self.element_from_class(&c), p)
            })
            .collect())
    }

    /// Greedy generator chain: scan candidates in order and keep each one
    /// whose residue is outside the subgroup generated so far. Returns the
    /// indices of the kept candidates.
    pub fn select_generator_indices(&self, candidates: &[Vec<BigInt>]) -> Result<Vec<usize>> {
        let mut chosen: Vec<usize> = Vec::new();
        let mut lattice = self.subgroup_lattice(&[])?;
        for (i, c) in candidates.iter().enumerate() {
            self.check_dim(c)?;
            if lattice.contains(c) {
                continue;
            }
            chosen.push(i);
            let gens: Vec<Vec<BigInt>> = chosen.iter().map(|&j| candidates[j].clone()).collect();
            lattice = self.subgroup_lattice(&gens)?;
            if lattice.index().is_some_and(|ix| ix.is_one()) {
                break;
            }
        }
        Ok(chosen)
    }

    pub fn select_generators(&self, candidates: &[Vec<BigInt>]) -> Result<Vec<Vec<BigInt>>> {
        Ok(self
            .select_generator_indices(candidates)?
            .into_iter()
            .map(|i| candidates[i].clone())
            .collect())
    }
}
