use super::FeatureMap;
use crate::math::Real;
use crate::Result;

pub fn relu<T: Real>(x: &FeatureMap<T>) -> FeatureMap<T> {
    x.map(|v| if v > T::ZERO { v } else { T::ZERO })
}

/// Hyperbolic tangent, kept strictly inside `(-1, 1)` even where the
/// rounded value would saturate.
pub fn tanh_act<T: Real>(x: &FeatureMap<T>) -> FeatureMap<T> {
    let hi = T::BELOW_ONE;
    let lo = T::from_f64(-hi.to_f64());
    x.map(|v| {
        let y = v.tanh();
        if y > hi {
            hi
        } else if y < lo {
            lo
        } else {
            y
        }
    })
}

/// Backward of [`relu`] given its input (or output: both are positive at the
/// same places). The subgradient at zero is zero.
pub fn relu_grad<T: Real>(x: &FeatureMap<T>, upstream: &FeatureMap<T>) -> Result<FeatureMap<T>> {
    x.check_same_shape(upstream)?;
    let mut g = upstream.clone();
    for (g, &v) in g.values.iter_mut().zip(&x.values) {
        if v <= T::ZERO {
            *g = T::ZERO;
        }
    }
    Ok(g)
}

/// Backward of [`tanh_act`] given its output `y`: `upstream · (1 - y²)`.
pub fn tanh_grad<T: Real>(y: &FeatureMap<T>, upstream: &FeatureMap<T>) -> Result<FeatureMap<T>> {
    y.check_same_shape(upstream)?;
    let mut g = upstream.clone();
    for (g, &y) in g.values.iter_mut().zip(&y.values) {
        let y = y.to_f64();
        *g = T::from_f64(g.to_f64() * (1.0 - y * y));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn relu_examples() {
        let x = FeatureMap::new(1, 3, vec![-1.0, 0.0, 2.0]).unwrap();
        assert_eq!(relu(&x).values(), &[0.0, 0.0, 2.0]);
        let up = FeatureMap::new(1, 3, vec![5.0, 5.0, 5.0]).unwrap();
        assert_eq!(relu_grad(&x, &up).unwrap().values(), &[0.0, 0.0, 5.0]);
    }

    #[test]
    fn tanh_examples() {
        let x = FeatureMap::new(1, 3, vec![0.0f64, 30.0, -1e6]).unwrap();
        let y = tanh_act(&x);
        assert_eq!(y.values()[0], 0.0);
        assert!(y.values().iter().all(|v| v.abs() < 1.0));
        let x32 = FeatureMap::new(1, 2, vec![0.0f32, 4.0]).unwrap();
        assert!(tanh_act(&x32).values()[1] < 1.0);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let a = FeatureMap::<f64>::zeros(1, 3);
        let b = FeatureMap::<f64>::zeros(1, 4);
        assert!(relu_grad(&a, &b).is_err());
        assert!(tanh_grad(&a, &b).is_err());
    }
}
