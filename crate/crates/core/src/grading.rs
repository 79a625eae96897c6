//! Graded dimensions of the mod-p Iwasawa algebra: the dimension of the
//! weight-`m` piece equals the number of commutative monomials of total
//! weight `m` in the generators, i.e. the coefficient of `t^m` in
//! `prod_g (1 - t^{weight(g)})^{-1}`.

use crate::error::{Error, Result};
use crate::ordering::GeneratorTable;

/// Default ceiling on the degree for the generating-function DP.
pub const DEFAULT_DEGREE_CAP: i64 = 64;

/// Coefficient of `t^m` in the weighted-monomial generating function,
/// by integer dynamic programming.
pub fn graded_dim_omega(gt: &GeneratorTable, m: i64) -> Result<u128> {
    graded_dim_omega_capped(gt, m, DEFAULT_DEGREE_CAP)
}

pub fn graded_dim_omega_capped(gt: &GeneratorTable, m: i64, cap: i64) -> Result<u128> {
    if m < 0 {
        return Ok(0);
    }
    if m > cap {
        return Err(Error::ResourceExceeded {
            what: "graded-dimension degree",
            needed: m as u128,
            cap: cap as u128,
        });
    }
    let n = m as usize;
    let mut dp = vec![0u128; n + 1];
    dp[0] = 1;
    for w in gt.weights() {
        let w = w as usize;
        for j in w..=n {
            dp[j] = dp[j]
                .checked_add(dp[j - w])
                .ok_or(Error::ResourceExceeded {
                    what: "graded-dimension magnitude",
                    needed: u128::MAX,
                    cap: u128::MAX,
                })?;
        }
    }
    Ok(dp[n])
}

/// Independent oracle: count monomial multisets of total weight `m` by
/// explicit recursive enumeration over the generator list. Guarded to
/// small `m`.
pub fn brute_force_count(gt: &GeneratorTable, m: i64) -> Result<u128> {
    const GUARD: i64 = 12;
    if m < 0 {
        return Ok(0);
    }
    if m > GUARD {
        return Err(Error::ResourceExceeded {
            what: "brute-force monomial degree",
            needed: m as u128,
            cap: GUARD as u128,
        });
    }
    let weights = gt.weights();
    fn recurse(weights: &[i64], remaining: i64) -> u128 {
        if remaining == 0 {
            return 1;
        }
        match weights.split_first() {
            None => 0,
            Some((&w, rest)) => {
                let mut count = 0u128;
                let mut used = 0i64;
                while used <= remaining {
                    count += recurse(rest, remaining - used);
                    used += w;
                }
                count
            }
        }
    }
    Ok(recurse(&weights, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordering::{generator_table, longest_word, papi_order};
    use crate::root_system::RootSystem;

    fn table(name: &str) -> GeneratorTable {
        let rs = RootSystem::new(name.parse().unwrap()).unwrap();
        let ord = papi_order(&rs, &longest_word(&rs)).unwrap();
        generator_table(&rs, &ord).unwrap()
    }

    #[test]
    fn a1_sequence() {
        let gt = table("A1");
        let expect = [1u128, 2, 4, 6, 9, 12];
        for (m, &e) in expect.iter().enumerate() {
            assert_eq!(graded_dim_omega(&gt, m as i64).unwrap(), e, "m = {m}");
        }
    }

    #[test]
    fn a2_low_degrees() {
        let gt = table("A2");
        assert_eq!(graded_dim_omega(&gt, 0).unwrap(), 1);
        assert_eq!(graded_dim_omega(&gt, 1).unwrap(), 3);
        assert_eq!(graded_dim_omega(&gt, 2).unwrap(), 9);
        assert_eq!(brute_force_count(&gt, 3).unwrap(), 21);
    }

    #[test]
    fn dp_matches_brute_force() {
        for name in ["A1", "A2", "A3", "B2", "B3", "C3", "G2"] {
            let gt = table(name);
            for m in 0..=10 {
                assert_eq!(
                    graded_dim_omega(&gt, m).unwrap(),
                    brute_force_count(&gt, m).unwrap(),
                    "{name} m={m}"
                );
            }
        }
    }

    #[test]
    fn gr0_gr1_and_positivity() {
        for name in ["A1", "A2", "A3", "B2", "B3", "G2", "F4"] {
            let gt = table(name);
            let rank = gt
                .generators
                .iter()
                .filter(|g| g.kind == crate::ordering::GenKind::W)
                .count();
            assert_eq!(graded_dim_omega(&gt, 0).unwrap(), 1);
            assert_eq!(graded_dim_omega(&gt, 1).unwrap(), (rank + 1) as u128);
            for m in 0..=20 {
                assert!(graded_dim_omega(&gt, m).unwrap() > 0);
            }
        }
    }

    #[test]
    fn guards() {
        let gt = table("A1");
        assert!(matches!(
            brute_force_count(&gt, 13),
            Err(Error::ResourceExceeded { .. })
        ));
        assert!(matches!(
            graded_dim_omega(&gt, 65),
            Err(Error::ResourceExceeded { .. })
        ));
        assert_eq!(brute_force_count(&gt, 0).unwrap(), 1);
    }
}
