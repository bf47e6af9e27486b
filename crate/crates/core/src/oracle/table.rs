use super::naive::NaiveLoads;
use crate::airspace::{Scenario, SectorId};
use crate::error::ModelError;

/// Joint profiles are encoded in mixed radix `p`, flight 0 most significant,
/// so index order equals lexicographic order of the delay vectors.
pub(crate) struct ProfileTable {
    pub p: usize,
    pub n: usize,
    place: Vec<usize>,
    pub rows: Vec<NaiveLoads>,
    pub overloads: Vec<Vec<u64>>,
}

pub(crate) fn space_size(p: usize, n: usize, cap: u64) -> Result<usize, ModelError> {
    let size = (p as f64).powi(n as i32);
    if size > cap as f64 {
        return Err(ModelError::SpaceTooLarge { size, cap });
    }
    Ok(size as usize)
}

impl ProfileTable {
    pub fn build(scenario: &Scenario, cap: u64) -> Result<Self, ModelError> {
        let p = scenario.num_actions();
        let n = scenario.num_flights();
        let size = space_size(p, n, cap)?;
        let mut place = vec![1usize; n];
        for f in (0..n.saturating_sub(1)).rev() {
            place[f] = place[f + 1] * p;
        }
        let mut table = ProfileTable {
            p,
            n,
            place,
            rows: Vec::with_capacity(size),
            overloads: Vec::with_capacity(size),
        };
        for idx in 0..size {
            let loads = NaiveLoads::count(scenario, &table.decode(idx));
            table.overloads.push(loads.overloads());
            table.rows.push(loads);
        }
        Ok(table)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn decode(&self, idx: usize) -> Vec<usize> {
        (0..self.n).map(|f| (idx / self.place[f]) % self.p).collect()
    }

    /// Every profile that differs from `x` only in the flights of `agent`,
    /// `x` itself included, in increasing index order.
    pub fn deviations(&self, scenario: &Scenario, x: usize, agent: SectorId) -> Vec<usize> {
        let flights: Vec<usize> = scenario.flights_of(agent).iter().map(|f| f.index()).collect();
        let base = flights
            .iter()
            .fold(x, |acc, &f| acc - ((x / self.place[f]) % self.p) * self.place[f]);
        let mut out = vec![base];
        for &f in flights.iter().rev() {
            out = out
                .iter()
                .flat_map(|&b| (0..self.p).map(move |d| (b, d)))
                .map(|(b, d)| b + d * self.place[f])
                .collect();
        }
        out.sort_unstable();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::tiny_one;

    #[test]
    fn decode_is_lexicographic() {
        let s = tiny_one();
        let t = ProfileTable::build(&s, 1 << 10).unwrap();
        let all: Vec<Vec<usize>> = (0..t.len()).map(|k| t.decode(k)).collect();
        assert_eq!(all, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(t.deviations(&s, 2, SectorId(0)), vec![0, 1, 2, 3]);
        assert_eq!(t.deviations(&s, 2, SectorId(1)), vec![2]);
    }

    #[test]
    fn refuses_large_space() {
        let s = tiny_one();
        assert!(matches!(ProfileTable::build(&s, 3), Err(ModelError::SpaceTooLarge { .. })));
    }
}
