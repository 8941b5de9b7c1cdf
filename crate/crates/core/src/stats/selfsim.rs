use super::ks::{ks_two_sample, EmpiricalSample, KSResult};
use super::StatsError;

/// Two-sample KS between `X_{c x}` and `c^exponent * X_x`.
///
/// `sampler(x, seed)` returns i.i.d. draws of the marginal at `x`; the two
/// calls use different seeds.
pub fn scaling_check<F, E>(
    mut sampler: F,
    x: f64,
    c: f64,
    exponent: f64,
    seed: u64,
) -> Result<KSResult, E>
where
    F: FnMut(f64, u64) -> Result<Vec<f64>, E>,
    E: From<StatsError>,
{
    let far = EmpiricalSample::new(sampler(c * x, seed)?)?;
    let near = EmpiricalSample::new(sampler(x, seed.wrapping_add(1))?)?;
    Ok(ks_two_sample(&far, &near.scaled(c.powf(exponent))))
}

/// [`scaling_check`] with the diffusive exponent `1/2`.
pub fn self_similarity_check<F, E>(sampler: F, x: f64, c: f64, seed: u64) -> Result<KSResult, E>
where
    F: FnMut(f64, u64) -> Result<Vec<f64>, E>,
    E: From<StatsError>,
{
    scaling_check(sampler, x, c, 0.5, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use rand::Rng;

    fn half_normal(x: f64, seed: u64, n: usize) -> Result<Vec<f64>, StatsError> {
        let mut rng = stream_rng(seed, 0, "selfsim-test");
        Ok((0..n)
            .map(|_| {
                let z: f64 = rng.sample(rand_distr::StandardNormal);
                (x.sqrt() * z).abs()
            })
            .collect())
    }

    #[test]
    fn unit_scale_compares_two_same_law_samples() {
        let r = self_similarity_check(|x, s| half_normal(x, s, 2000), 1.0, 1.0, 1).unwrap();
        assert!(r.p_value > 0.001);
    }

    #[test]
    fn diffusive_scaling_accepts_and_linear_scaling_rejects() {
        let good = self_similarity_check(|x, s| half_normal(x, s, 5000), 1.0, 4.0, 7).unwrap();
        assert!(good.p_value > 0.001, "{good:?}");
        let bad = scaling_check(|x, s| half_normal(x, s, 5000), 1.0, 4.0, 1.0, 7).unwrap();
        assert!(bad.p_value < 1e-6, "{bad:?}");
        assert!(bad.statistic > 0.3);
    }

    #[test]
    fn empty_samples_propagate() {
        let r = self_similarity_check(|_, _| Ok::<_, StatsError>(vec![]), 1.0, 4.0, 0);
        assert_eq!(r, Err(StatsError::EmptySample));
    }
}
