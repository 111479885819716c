//! Procurement cost `(P/η) ∫ π(t) u(t) dt` with prices in currency/MWh.

use crate::model::{StepFunction, KWS_PER_MWH};

/// Exact `∫ f g dt` for two step functions on the same horizon.
pub fn product_integral(f: &StepFunction, g: &StepFunction) -> f64 {
    let (fb, fv) = (f.breakpoints(), f.values());
    let (gb, gv) = (g.breakpoints(), g.values());
    let end = f.horizon().min(g.horizon());
    let (mut i, mut j) = (0, 0);
    let mut t = 0.0;
    let mut total = 0.0;
    while i < fv.len() && j < gv.len() && t < end {
        let next = fb[i + 1].min(gb[j + 1]).min(end);
        total += fv[i] * gv[j] * (next - t);
        t = next;
        if fb[i + 1] <= t {
            i += 1;
        }
        if gb[j + 1] <= t {
            j += 1;
        }
    }
    total
}

/// Cost of running one load with control `u` at electrical power `electrical_kw`.
pub fn procurement_cost(price: &StepFunction, u: &StepFunction, electrical_kw: f64) -> f64 {
    electrical_kw * product_integral(price, u) / KWS_PER_MWH
}
