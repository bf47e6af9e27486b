//! Reference model for the integration tests.
//!
//! Everything is recounted from the scenario document by direct interval
//! arithmetic. Nothing here calls the crate's load tables, cost or
//! potential functions, or its oracle module.
#![allow(dead_code)]

use std::collections::BTreeSet;

use decongest_core::{Kappa, Scenario};

/// `κ = num / den` as exact integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Q {
    pub num: i128,
    pub den: i128,
}

pub fn q(k: Kappa) -> Q {
    match k {
        Kappa::Ratio { num, den } => Q {
            num: num as i128,
            den: den as i128,
        },
        Kappa::Real(v) => panic!("reference model needs an exact kappa, got {v}"),
    }
}

pub fn ratio(num: u64, den: u64) -> Kappa {
    Kappa::ratio(num, den).unwrap()
}

struct Stay {
    sector: usize,
    from: u32,
    to: u32,
}

struct Fl {
    owner: usize,
    departure: u32,
    stays: Vec<Stay>,
}

pub struct Ref {
    caps: Vec<i64>,
    width: u32,
    bins: u32,
    delays: Vec<u32>,
    flights: Vec<Fl>,
}

/// Loads of one profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counts {
    /// `occ[s][t]`
    pub occ: Vec<Vec<i64>>,
    /// `own[s][t]`: flights owned by `s` present in `(s, t)`.
    pub own: Vec<Vec<i64>>,
    /// Per-sector overload `L_s`.
    pub l: Vec<i64>,
}

impl Ref {
    pub fn new(s: &Scenario) -> Self {
        let doc = s.doc();
        Ref {
            caps: doc.sectors.iter().map(|x| x.capacity as i64).collect(),
            width: doc.bin_width,
            bins: doc.horizon / doc.bin_width,
            delays: doc.action_set.clone(),
            flights: doc
                .flights
                .iter()
                .map(|f| Fl {
                    owner: f.owner.0 as usize,
                    departure: f.base_departure,
                    stays: f
                        .segments
                        .iter()
                        .map(|g| Stay {
                            sector: g.sector.0 as usize,
                            from: g.entry_offset,
                            to: g.exit_offset,
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn m(&self) -> usize {
        self.caps.len()
    }

    pub fn n(&self) -> usize {
        self.flights.len()
    }

    pub fn p(&self) -> usize {
        self.delays.len()
    }

    pub fn owned(&self, agent: usize) -> Vec<usize> {
        (0..self.n()).filter(|&f| self.flights[f].owner == agent).collect()
    }

    fn present(&self, f: usize, delay: u32, sector: usize, t: u32) -> bool {
        let fl = &self.flights[f];
        let (lo, hi) = (t * self.width, (t + 1) * self.width);
        fl.stays.iter().any(|st| {
            let (a, b) = (fl.departure + delay + st.from, fl.departure + delay + st.to);
            st.sector == sector && a < hi && lo < b
        })
    }

    pub fn counts(&self, x: &[usize]) -> Counts {
        let (m, bins) = (self.m(), self.bins as usize);
        let mut occ = vec![vec![0i64; bins]; m];
        let mut own = vec![vec![0i64; bins]; m];
        for s in 0..m {
            for t in 0..self.bins {
                for (f, fl) in self.flights.iter().enumerate() {
                    if self.present(f, self.delays[x[f]], s, t) {
                        occ[s][t as usize] += 1;
                        if fl.owner == s {
                            own[s][t as usize] += 1;
                        }
                    }
                }
            }
        }
        let l = (0..m)
            .map(|s| occ[s].iter().map(|&c| (c - self.caps[s]).max(0)).sum())
            .collect();
        Counts { occ, own, l }
    }

    pub fn overloads(&self, x: &[usize]) -> Vec<i64> {
        self.counts(x).l
    }

    pub fn overloaded(&self, x: &[usize]) -> BTreeSet<u32> {
        self.overloads(x)
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > 0)
            .map(|(s, _)| s as u32)
            .collect()
    }

    pub fn total(&self, x: &[usize]) -> i64 {
        self.overloads(x).iter().sum()
    }

    /// `den · J_i`.
    pub fn cost_from(l: &[i64], i: usize, k: Q) -> i128 {
        let others: i64 = l.iter().sum::<i64>() - l[i];
        k.den * l[i] as i128 + k.num * others as i128
    }

    pub fn cost(&self, x: &[usize], i: usize, k: Q) -> i128 {
        Self::cost_from(&self.overloads(x), i, k)
    }

    /// `den · Φ`.
    pub fn potential_from(&self, c: &Counts, k: Q) -> i128 {
        let total: i64 = c.l.iter().sum();
        let mut own = 0i64;
        for s in 0..self.m() {
            for t in 0..self.bins as usize {
                if c.occ[s][t] > self.caps[s] {
                    own += c.own[s][t];
                }
            }
        }
        k.num * total as i128 + (k.den - k.num) * own as i128
    }

    pub fn potential(&self, x: &[usize], k: Q) -> i128 {
        self.potential_from(&self.counts(x), k)
    }

    /// Every joint profile, odometer order with the last flight fastest.
    pub fn profiles(&self) -> Vec<Vec<usize>> {
        odometer(self.n(), self.p(), vec![0; self.n()], &(0..self.n()).collect::<Vec<_>>())
    }

    /// Every profile reachable by `agent` alone, `x` included.
    pub fn unilateral(&self, x: &[usize], agent: usize) -> Vec<Vec<usize>> {
        odometer(self.n(), self.p(), x.to_vec(), &self.owned(agent))
    }

    /// No sector feasible under `before` is overloaded under `after`.
    pub fn allowed(before: &[i64], after: &[i64]) -> bool {
        before.iter().zip(after).all(|(&b, &a)| b > 0 || a == 0)
    }

    /// Lowest `den · J_agent` over the agent's restricted deviations.
    pub fn best_restricted(&self, x: &[usize], agent: usize, k: Q) -> i128 {
        let lx = self.overloads(x);
        self.unilateral(x, agent)
            .iter()
            .map(|y| self.overloads(y))
            .filter(|ly| Self::allowed(&lx, ly))
            .map(|ly| Self::cost_from(&ly, agent, k))
            .min()
            .expect("x itself is allowed")
    }

    pub fn is_restricted_nash(&self, x: &[usize], k: Q) -> bool {
        let lx = self.overloads(x);
        (0..self.m()).all(|i| self.best_restricted(x, i, k) >= Self::cost_from(&lx, i, k))
    }
}

fn odometer(n: usize, p: usize, base: Vec<usize>, digits: &[usize]) -> Vec<Vec<usize>> {
    let mut y = base;
    for &d in digits {
        y[d] = 0;
    }
    let mut out = vec![y.clone()];
    debug_assert!(y.len() == n);
    'next: loop {
        for &d in digits.iter().rev() {
            y[d] += 1;
            if y[d] < p {
                out.push(y.clone());
                continue 'next;
            }
            y[d] = 0;
        }
        return out;
    }
}
