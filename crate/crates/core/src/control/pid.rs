use serde::{Deserialize, Serialize};

/// Gains of one scalar PID channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    /// Bound on the integral contribution `ki * integral` (output units).
    pub integral_limit: f64,
    /// Bound on the output magnitude.
    pub output_limit: f64,
}

/// Gains for one three-axis loop of the cascade.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopGains {
    pub kp: [f64; 3],
    pub ki: [f64; 3],
    pub kd: [f64; 3],
    pub integral_limit: f64,
    pub output_limit: f64,
}

impl LoopGains {
    pub fn axis(&self, i: usize) -> PidGains {
        PidGains {
            kp: self.kp[i],
            ki: self.ki[i],
            kd: self.kd[i],
            integral_limit: self.integral_limit,
            output_limit: self.output_limit,
        }
    }

    pub fn validate(&self, name: &str) -> Result<(), String> {
        let all = self.kp.iter().chain(&self.ki).chain(&self.kd);
        if all.clone().any(|g| !(*g >= 0.0) || !g.is_finite()) {
            return Err(format!("{name}: gains must be finite and >= 0"));
        }
        if !(self.integral_limit > 0.0) || !(self.output_limit > 0.0) {
            return Err(format!("{name}: integral and output limits must be > 0"));
        }
        Ok(())
    }
}

/// Scalar PID with clamped integrator and saturated output.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pid {
    integral: f64,
}

impl Pid {
    pub fn integral(&self) -> f64 {
        self.integral
    }

    pub fn reset(&mut self) {
        self.integral = 0.0;
    }

    /// Set the integrator so that `ki * integral == contribution`.
    pub fn seed(&mut self, gains: &PidGains, contribution: f64) {
        self.integral = if gains.ki > 0.0 {
            let c = contribution.clamp(-gains.integral_limit, gains.integral_limit);
            c / gains.ki
        } else {
            0.0
        };
    }

    pub fn integral_term(&self, gains: &PidGains) -> f64 {
        gains.ki * self.integral
    }

    pub fn step(&mut self, gains: &PidGains, error: f64, error_rate: f64, dt: f64) -> f64 {
        debug_assert!(dt > 0.0);
        if gains.ki > 0.0 {
            let bound = gains.integral_limit / gains.ki;
            self.integral = (self.integral + error * dt).clamp(-bound, bound);
        }
        let u = gains.kp * error + gains.kd * error_rate + gains.ki * self.integral;
        u.clamp(-gains.output_limit, gains.output_limit)
    }
}

/// Three independent PID channels.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pid3 {
    pub axes: [Pid; 3],
}

impl Pid3 {
    pub fn step(
        &mut self,
        gains: &LoopGains,
        error: [f64; 3],
        error_rate: [f64; 3],
        dt: f64,
    ) -> [f64; 3] {
        std::array::from_fn(|i| self.axes[i].step(&gains.axis(i), error[i], error_rate[i], dt))
    }

    pub fn reset(&mut self) {
        self.axes.iter_mut().for_each(Pid::reset);
    }

    /// Re-seed integrators so their contribution under `to` equals the one
    /// they had under `from`.
    pub fn transfer(&mut self, from: &LoopGains, to: &LoopGains) {
        for i in 0..3 {
            let c = self.axes[i].integral_term(&from.axis(i));
            self.axes[i].seed(&to.axis(i), c);
        }
    }
}
