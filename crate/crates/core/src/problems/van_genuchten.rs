//! Van Genuchten-Mualem soil model.

/// Soil parameters. `theta` and `conductivity` are evaluated pointwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VanGenuchten {
    pub theta_s: f64,
    pub theta_r: f64,
    pub alpha: f64,
    pub n: f64,
    pub k_s: f64,
}

impl Default for VanGenuchten {
    fn default() -> Self {
        Self::silt_loam()
    }
}

impl VanGenuchten {
    /// Silt loam parameters used by the trench infiltration benchmark.
    pub fn silt_loam() -> Self {
        Self {
            theta_s: 0.396,
            theta_r: 0.131,
            alpha: 0.423,
            n: 2.06,
            k_s: 4.96e-2,
        }
    }

    fn m(&self) -> f64 {
        (self.n - 1.0) / self.n
    }

    /// Water content; saturated for `psi >= 0`.
    pub fn theta(&self, psi: f64) -> f64 {
        if psi >= 0.0 {
            return self.theta_s;
        }
        let se = (1.0 + (-self.alpha * psi).powf(self.n)).powf(-self.m());
        self.theta_r + (self.theta_s - self.theta_r) * se
    }

    /// `dθ/dψ`, zero in the saturated zone.
    pub fn dtheta(&self, psi: f64) -> f64 {
        if psi >= 0.0 {
            return 0.0;
        }
        let m = self.m();
        let a = -self.alpha * psi;
        let p = a.powf(self.n);
        (self.theta_s - self.theta_r) * m * self.n * self.alpha * a.powf(self.n - 1.0) * (1.0 + p).powf(-m - 1.0)
    }

    /// Hydraulic conductivity as a function of the water content.
    pub fn conductivity_from_theta(&self, theta: f64) -> f64 {
        let r = (theta / self.theta_s).clamp(0.0, 1.0);
        let m = self.m();
        let inner = 1.0 - (1.0 - r.powf(1.0 / m)).powf(m);
        self.k_s * r.sqrt() * inner * inner
    }

    pub fn conductivity(&self, psi: f64) -> f64 {
        self.conductivity_from_theta(self.theta(psi))
    }

    /// Largest slope of `θ`, attained where `dθ²/dψ² = 0`.
    pub fn max_dtheta(&self) -> f64 {
        let m = self.m();
        // a^n = m at the inflection point of the effective saturation.
        let psi = -(m.powf(1.0 / self.n)) / self.alpha;
        self.dtheta(psi)
    }
}
