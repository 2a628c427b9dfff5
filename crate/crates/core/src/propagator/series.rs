//! First-order expansion of the Wei-Norman factors about the unidirectional
//! limit η = 1, in ε = 1 − η. The ε-linear coefficients are those of the exact
//! closed forms (checked against a central difference in ε in the tests).

use num_complex::Complex64;

use super::{PropagatorError, WeiNormanFactors};
use crate::model::ModelParams;

pub fn unidirectional_series(params: &ModelParams, z: f64) -> Result<WeiNormanFactors, PropagatorError> {
    params.validate()?;
    let eps = 1.0 - params.eta;
    if eps > 0.1 {
        return Err(PropagatorError::OutsideAsymptoticRegime { epsilon: eps });
    }
    let g = params.gamma;
    if !(g > 0.0) {
        return Err(PropagatorError::ZeroDissipation);
    }
    let nu0 = params.nu0;
    let decay = (-g * z).exp();
    let one_minus = -(-g * z).exp_m1();

    let f_z = Complex64::new(0.0, -g * z + 4.0 * nu0 * nu0 * eps / (g * g) * (g * z - one_minus));
    let f_minus = nu0 * eps / g * one_minus;
    let f_plus = 2.0 * nu0 / g * one_minus
        + eps * (-nu0 / g * one_minus + 4.0 * nu0.powi(3) / g.powi(3) * (1.0 - 2.0 * g * z * decay - decay * decay));
    Ok(WeiNormanFactors {
        f_plus: f_plus.into(),
        f_z,
        f_minus: f_minus.into(),
        z,
    })
}
