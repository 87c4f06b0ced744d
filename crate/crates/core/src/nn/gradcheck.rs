use alloc::string::String;

use super::ParameterSet;

/// Central-difference step.
pub const FD_STEP: f64 = 1e-5;

/// Denominator floor for [`relative_error`]; below it the error is
/// effectively absolute.
const REL_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub max_relative_error: f64,
    /// Parameter name and flat index of the worst entry.
    pub worst: Option<(String, usize)>,
    pub checked: usize,
    pub tolerance: f64,
    pub passed: bool,
}

/// `|a - n| / max(|a|, |n|, 1e-6)`.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(REL_FLOOR)
}

/// Compares the gradients stored in `params` against central differences of
/// `loss`, perturbing every scalar parameter by `±step`.
///
/// `loss` must be deterministic. Parameter values are restored afterwards.
pub fn finite_difference_check<F>(
    params: &mut ParameterSet,
    mut loss: F,
    step: f64,
    tolerance: f64,
) -> GradCheckReport
where
    F: FnMut(&ParameterSet) -> f64,
{
    let mut report = GradCheckReport {
        max_relative_error: 0.0,
        worst: None,
        checked: 0,
        tolerance,
        passed: true,
    };
    let ids: alloc::vec::Vec<_> = (0..params.len()).map(super::ParamId).collect();
    for id in ids {
        for i in 0..params.value(id).data().len() {
            let original = params.value(id).data()[i];
            params.value_mut(id).data_mut()[i] = original + step;
            let up = loss(params);
            params.value_mut(id).data_mut()[i] = original - step;
            let down = loss(params);
            params.value_mut(id).data_mut()[i] = original;

            let numeric = (up - down) / (2.0 * step);
            let err = relative_error(params.grad(id).data()[i], numeric);
            report.checked += 1;
            if !(err <= report.max_relative_error) {
                report.max_relative_error = err;
                let name = params.iter().nth(id.0).map(|p| p.name.clone()).unwrap_or_default();
                report.worst = Some((name, i));
            }
        }
    }
    report.passed = report.max_relative_error < tolerance;
    report
}
