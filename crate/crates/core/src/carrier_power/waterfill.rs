//! Capped water-filling: the exact solver of the interference-frozen surrogate.
//!
//! A channel with floor `b = 1/a` (inverse SNR per watt) and ceiling `c`
//! receives `(min(w, c) - b)^+` watts at water level `w`. Ceilings express a
//! beam's demand (or a transponder cap): past them extra power buys nothing.

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Channel {
    pub floor: f64,
    pub ceiling: f64,
}

impl Channel {
    pub fn power_at(&self, level: f64) -> f64 {
        (level.min(self.ceiling) - self.floor).max(0.0)
    }
}

fn consumption(channels: &[Channel], level: f64) -> f64 {
    channels.iter().map(|c| c.power_at(level)).sum()
}

/// Lowest level whose consumption reaches `budget`, or `+inf` when every
/// channel can sit at its ceiling within budget.
pub(crate) fn level_for_budget(channels: &[Channel], budget: f64) -> f64 {
    let live: Vec<Channel> = channels
        .iter()
        .copied()
        .filter(|c| c.floor.is_finite() && c.ceiling > c.floor)
        .collect();
    if live.is_empty() {
        return f64::INFINITY;
    }
    let mut breaks: Vec<f64> = live
        .iter()
        .flat_map(|c| [c.floor, c.ceiling])
        .filter(|v| v.is_finite())
        .collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let top = *breaks.last().expect("floors are finite");
    let all_capped = live.iter().all(|c| c.ceiling.is_finite());
    if all_capped && consumption(&live, top) <= budget {
        return f64::INFINITY;
    }
    // Consumption is piecewise linear and nondecreasing between breakpoints;
    // find the first breakpoint at or above the budget and interpolate.
    let idx = breaks.partition_point(|&w| consumption(&live, w) < budget);
    if idx == breaks.len() {
        // beyond the last breakpoint only uncapped channels keep rising
        let slope = live.iter().filter(|c| c.ceiling.is_infinite()).count() as f64;
        return top + (budget - consumption(&live, top)) / slope;
    }
    if idx == 0 {
        return breaks[0];
    }
    let (lo, hi) = (breaks[idx - 1], breaks[idx]);
    let (f_lo, f_hi) = (consumption(&live, lo), consumption(&live, hi));
    if f_hi <= f_lo {
        return hi;
    }
    lo + (hi - lo) * (budget - f_lo) / (f_hi - f_lo)
}

/// Level at which `sum_k log2(1 + a_k (w - 1/a_k)^+) = target` (bits/s/Hz).
pub(crate) fn demand_level(gains: &[f64], target: f64) -> f64 {
    if target <= 0.0 {
        return 0.0;
    }
    let mut a: Vec<f64> = gains.iter().copied().filter(|&g| g > 0.0).collect();
    if a.is_empty() {
        return f64::INFINITY;
    }
    a.sort_by(|x, y| y.total_cmp(x));
    let mut log_sum = 0.0;
    for n in 1..=a.len() {
        log_sum += a[n - 1].log2();
        let w = ((target - log_sum) / n as f64).exp2();
        let next_ok = n == a.len() || a[n] * w <= 1.0;
        if a[n - 1] * w >= 1.0 && next_ok {
            return w;
        }
    }
    // unreachable for positive gains; keep the all-active solution
    ((target - log_sum) / a.len() as f64).exp2()
}
