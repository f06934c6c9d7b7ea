use crate::error::{Error, Result};

/// Mean with population variance and standard deviation over runs or folds.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSummary {
    pub mean: f64,
    pub variance: f64,
    pub std: f64,
    pub per_run: Vec<f64>,
}

fn check_lengths(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    if a.is_empty() {
        return Err(Error::invalid("metric over empty vectors"));
    }
    Ok(())
}

pub fn mse(a: &[f64], b: &[f64]) -> Result<f64> {
    check_lengths(a, b)?;
    Ok(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64)
}

/// Pearson product-moment correlation.
pub fn ppcc(a: &[f64], b: &[f64]) -> Result<f64> {
    check_lengths(a, b)?;
    if a.len() < 2 {
        return Err(Error::invalid("correlation needs at least two points"));
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (da, db) = (x - ma, y - mb);
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if saa == 0.0 {
        return Err(Error::UndefinedCorrelation("first argument"));
    }
    if sbb == 0.0 {
        return Err(Error::UndefinedCorrelation("second argument"));
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

pub fn summarize(values: &[f64]) -> Result<MetricSummary> {
    if values.is_empty() {
        return Err(Error::invalid("cannot summarize an empty list"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let variance = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Ok(MetricSummary { mean, variance, std: variance.sqrt(), per_run: values.to_vec() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mse_examples() {
        assert_eq!(mse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(mse(&[1.0, 2.0], &[0.0, 0.0]).unwrap(), 2.5);
        assert_eq!(mse(&[3.0], &[0.0]).unwrap(), 9.0);
        assert!(mse(&[1.0], &[1.0, 2.0]).is_err());
        assert!(mse(&[], &[]).is_err());
    }

    #[test]
    fn ppcc_examples() {
        assert!((ppcc(&[1.0, 2.0, 4.0], &[1.0, 2.0, 4.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((ppcc(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
        // Deviations (-1.5, -0.5, 0.5, 1.5) and (-1.75, -0.75, 0.25, 2.25):
        // cross sum 6.5, squared sums 5 and 8.75.
        let expect = 6.5 / (5.0f64.sqrt() * 8.75f64.sqrt());
        let r = ppcc(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 5.0]).unwrap();
        assert!((r - expect).abs() < 1e-14);
        assert!(matches!(ppcc(&[1.0, 1.0], &[1.0, 2.0]), Err(Error::UndefinedCorrelation(_))));
    }

    #[test]
    fn summarize_examples() {
        let s = summarize(&[5.0]).unwrap();
        assert_eq!((s.mean, s.variance, s.std), (5.0, 0.0, 0.0));
        let s = summarize(&[1.0, 3.0]).unwrap();
        assert_eq!((s.mean, s.variance, s.std), (2.0, 1.0, 1.0));
        assert!(summarize(&[]).is_err());
    }

    fn vecs() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (2usize..30)
            .prop_flat_map(|n| (prop::collection::vec(-10.0f64..10.0, n), prop::collection::vec(-10.0f64..10.0, n)))
    }

    proptest! {
        #[test]
        fn mse_symmetric_and_shift_invariant((a, b) in vecs(), c in -5.0f64..5.0) {
            let m = mse(&a, &b).unwrap();
            prop_assert!(m >= 0.0);
            prop_assert_eq!(m, mse(&b, &a).unwrap());
            let ac: Vec<f64> = a.iter().map(|v| v + c).collect();
            let bc: Vec<f64> = b.iter().map(|v| v + c).collect();
            prop_assert!((mse(&ac, &bc).unwrap() - m).abs() < 1e-12 * m.max(1.0));
        }

        #[test]
        fn ppcc_affine_behaviour((a, b) in vecs(), s in 0.1f64..10.0, c in -5.0f64..5.0) {
            prop_assume!(ppcc(&a, &b).is_ok());
            let r = ppcc(&a, &b).unwrap();
            let pos: Vec<f64> = a.iter().map(|v| s * v + c).collect();
            let neg: Vec<f64> = a.iter().map(|v| -s * v + c).collect();
            prop_assert!((ppcc(&pos, &b).unwrap() - r).abs() < 1e-10);
            prop_assert!((ppcc(&neg, &b).unwrap() + r).abs() < 1e-10);
            prop_assert!((-1.0..=1.0).contains(&r));
        }

        #[test]
        fn summary_std_is_sqrt_variance(v in prop::collection::vec(-100.0f64..100.0, 1..20)) {
            let s = summarize(&v).unwrap();
            prop_assert!(s.variance >= 0.0);
            prop_assert!((s.std - s.variance.sqrt()).abs() < 1e-12);
        }
    }
}
