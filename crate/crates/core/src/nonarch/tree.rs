//! Piecewise affine functions on finite subtrees of the disk space, with
//! exact rational Dirichlet energy.
//!
//! A function is stored by its values on a join-closed set of disks. Edge
//! lengths are differences of diameter exponents, so every energy here is a
//! rational number; the physical quantity carries one factor of ln p:
//!
//!   <phi, phi>      = dirichlet_exponent() / ln p,
//!   -(nu, nu)       = nu_energy_exponent() * ln p,
//!   integral phi dnu = pairing(nu)            (no ln p factor).
//!
//! The product of the two energies is therefore a plain rational, and the
//! Cauchy-Schwarz inequality (integral phi dnu)^2 <= <phi,phi> * (-(nu,nu))
//! can be decided exactly.

use super::skeleton::SkeletonPoint;
use crate::error::Error;
use crate::exact::Rat;
use crate::Result;
use num::{Signed, Zero};

pub struct TreeFunction {
    nodes: Vec<SkeletonPoint>,
    values: Vec<Rat>,
    parent: Vec<Option<usize>>,
    /// Exponent length of the edge to the parent (root entry is zero).
    edge_len: Vec<Rat>,
}

/// Adds all pairwise joins to the set, keeping one description per disk.
pub fn close_under_joins(mut pts: Vec<SkeletonPoint>) -> Vec<SkeletonPoint> {
    let mut changed = true;
    while changed {
        changed = false;
        let n = pts.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let jn = pts[i].join(&pts[j]);
                if !pts.iter().any(|q| q.same_point(&jn)) {
                    pts.push(jn);
                    changed = true;
                }
            }
        }
    }
    pts
}

impl TreeFunction {
    /// Builds the function from disk/value pairs. The disks must share one
    /// prime, have positive diameter, and be closed under pairwise joins.
    pub fn new(entries: Vec<(SkeletonPoint, Rat)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::degenerate("empty tree"));
        }
        let p = entries[0].0.prime();
        let mut nodes: Vec<SkeletonPoint> = Vec::new();
        let mut values: Vec<Rat> = Vec::new();
        for (s, v) in entries {
            if s.prime() != p {
                return Err(Error::degenerate("mixed primes in one tree"));
            }
            if s.is_classical() {
                return Err(Error::unsupported(
                    "tree functions live on disks of positive diameter",
                ));
            }
            match nodes.iter().position(|q| q.same_point(&s)) {
                Some(i) => {
                    if values[i] != v {
                        return Err(Error::degenerate(
                            "conflicting values on one tree node",
                        ));
                    }
                }
                None => {
                    nodes.push(s);
                    values.push(v);
                }
            }
        }
        for i in 0..nodes.len() {
            for j in (i + 1)..nodes.len() {
                let jn = nodes[i].join(&nodes[j]);
                if !nodes.iter().any(|q| q.same_point(&jn)) {
                    return Err(Error::degenerate(
                        "node set is not closed under joins",
                    ));
                }
            }
        }
        // The containers of any node form a chain, so the minimal strict
        // container is its tree parent.
        let mut parent = vec![None; nodes.len()];
        let mut edge_len = vec![Rat::zero(); nodes.len()];
        for i in 0..nodes.len() {
            let mut best: Option<usize> = None;
            for j in 0..nodes.len() {
                if i == j || !nodes[j].contains(&nodes[i]) {
                    continue;
                }
                if nodes[i].contains(&nodes[j]) {
                    continue; // same disk cannot happen after dedupe
                }
                best = match best {
                    None => Some(j),
                    Some(b) => {
                        if nodes[b].contains(&nodes[j]) {
                            Some(j)
                        } else {
                            Some(b)
                        }
                    }
                };
            }
            if let Some(b) = best {
                parent[i] = Some(b);
                let ei = nodes[i].diam_exp().clone().expect("disk node");
                let eb = nodes[b].diam_exp().clone().expect("disk node");
                edge_len[i] = &eb - &ei;
                debug_assert!(edge_len[i].is_positive());
            }
        }
        debug_assert_eq!(parent.iter().filter(|x| x.is_none()).count(), 1);
        Ok(TreeFunction { nodes, values, parent, edge_len })
    }

    /// Interpolates `f` on a join-closed node set.
    pub fn from_fn(
        pts: Vec<SkeletonPoint>,
        f: impl Fn(&SkeletonPoint) -> Rat,
    ) -> Result<Self> {
        let closed = close_under_joins(pts);
        let entries = closed.into_iter().map(|s| {
            let v = f(&s);
            (s, v)
        });
        Self::new(entries.collect())
    }

    pub fn nodes(&self) -> &[SkeletonPoint] {
        &self.nodes
    }

    pub fn value(&self, i: usize) -> &Rat {
        &self.values[i]
    }

    pub fn node_index(&self, s: &SkeletonPoint) -> Option<usize> {
        self.nodes.iter().position(|q| q.same_point(s))
    }

    /// Sum over edges of (value difference)^2 / (exponent length).
    /// The physical Dirichlet energy is this divided by ln p.
    pub fn dirichlet_exponent(&self) -> Rat {
        let mut acc = Rat::zero();
        for i in 0..self.nodes.len() {
            if let Some(b) = self.parent[i] {
                let dc = &self.values[i] - &self.values[b];
                acc += &dc * &dc / &self.edge_len[i];
            }
        }
        acc
    }

    /// Largest |slope| along an edge, in exponent units (per ln p of path
    /// length).
    pub fn lipschitz_exponent(&self) -> Rat {
        let mut best = Rat::zero();
        for i in 0..self.nodes.len() {
            if let Some(b) = self.parent[i] {
                let s = (&self.values[i] - &self.values[b]).abs() / &self.edge_len[i];
                if s > best {
                    best = s;
                }
            }
        }
        best
    }

    fn dense_nu(&self, nu: &[(usize, Rat)]) -> Result<Vec<Rat>> {
        let mut dense = vec![Rat::zero(); self.nodes.len()];
        for (i, mass) in nu {
            if *i >= self.nodes.len() {
                return Err(Error::degenerate("measure index out of range"));
            }
            dense[*i] += mass;
        }
        Ok(dense)
    }

    /// integral of the function against the node measure.
    pub fn pairing(&self, nu: &[(usize, Rat)]) -> Result<Rat> {
        let dense = self.dense_nu(nu)?;
        Ok(dense
            .iter()
            .zip(&self.values)
            .map(|(m, c)| m * c)
            .fold(Rat::zero(), |a, b| a + b))
    }

    /// For a measure of total mass zero: sum over edges of
    /// (subtree flux)^2 * (exponent length). The physical energy -(nu,nu)
    /// under the canonical kernel is this times ln p.
    pub fn nu_energy_exponent(&self, nu: &[(usize, Rat)]) -> Result<Rat> {
        let dense = self.dense_nu(nu)?;
        let total: Rat = dense.iter().fold(Rat::zero(), |a, b| a + b);
        if !total.is_zero() {
            return Err(Error::degenerate(
                "energy pairing needs a measure of total mass zero",
            ));
        }
        // Children first: order nodes by increasing diameter exponent.
        let mut order: Vec<usize> = (0..self.nodes.len()).collect();
        order.sort_by(|&a, &b| {
            let ea = self.nodes[a].diam_exp().clone().expect("disk");
            let eb = self.nodes[b].diam_exp().clone().expect("disk");
            ea.cmp(&eb)
        });
        let mut mass = dense;
        let mut acc = Rat::zero();
        for &i in &order {
            if let Some(b) = self.parent[i] {
                acc += &mass[i] * &mass[i] * &self.edge_len[i];
                let mi = mass[i].clone();
                mass[b] += mi;
            }
        }
        Ok(acc)
    }

    /// Both sides of the energy Cauchy-Schwarz inequality as exact
    /// rationals: ((integral phi dnu)^2, <phi,phi> * -(nu,nu)). The ln p
    /// factors of the two energies cancel.
    pub fn cauchy_schwarz_check(&self, nu: &[(usize, Rat)]) -> Result<(Rat, Rat)> {
        let pair = self.pairing(nu)?;
        let rhs = self.dirichlet_exponent() * self.nu_energy_exponent(nu)?;
        Ok((&pair * &pair, rhs))
    }
}
