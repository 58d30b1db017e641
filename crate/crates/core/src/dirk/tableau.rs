use crate::error::{Error, Result};
use crate::sparse::SmallDense;

/// Butcher tableau of a diagonally implicit Runge-Kutta method.
#[derive(Clone, Debug, PartialEq)]
pub struct ButcherTableau {
    a: SmallDense,
    b: Vec<f64>,
    c: Vec<f64>,
    stiffly_accurate: bool,
    explicit_first_stage: bool,
}

const FLAG_TOL: f64 = 1e-14;

impl ButcherTableau {
    /// Validates lower-triangularity and derives the two structural flags.
    pub fn new(a: Vec<Vec<f64>>, b: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        let m = b.len();
        if m == 0 || c.len() != m || a.len() != m || a.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidInput(format!(
                "tableau needs an {m}x{m} matrix and {m} nodes, got {} rows and {} nodes",
                a.len(),
                c.len()
            )));
        }
        let a = SmallDense::from_rows(&a)?;
        if !a.is_lower_triangular() {
            return Err(Error::InvalidInput("tableau matrix is not lower triangular".into()));
        }
        let stiffly_accurate = (0..m).all(|i| (b[i] - a.get(m - 1, i)).abs() <= FLAG_TOL);
        let explicit_first_stage = a.get(0, 0) == 0.0 && c[0] == 0.0;
        Ok(Self {
            a,
            b,
            c,
            stiffly_accurate,
            explicit_first_stage,
        })
    }

    /// Two-stage Θ-method with an explicit first stage.
    pub fn theta(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(Error::InvalidInput(format!("theta must lie in (0, 1], got {theta}")));
        }
        Self::new(
            vec![vec![0.0, 0.0], vec![1.0 - theta, theta]],
            vec![1.0 - theta, theta],
            vec![0.0, 1.0],
        )
    }

    pub fn implicit_euler() -> Self {
        Self::new(vec![vec![1.0]], vec![1.0], vec![1.0]).expect("valid tableau")
    }

    pub fn crank_nicolson() -> Self {
        Self::theta(0.5).expect("valid tableau")
    }

    /// Two-stage, second-order, L-stable SDIRK with `α = 1 − √2/2`.
    pub fn sdirk2() -> Self {
        let al = 1.0 - std::f64::consts::FRAC_1_SQRT_2;
        Self::new(
            vec![vec![al, 0.0], vec![1.0 - al, al]],
            vec![1.0 - al, al],
            vec![al, 1.0],
        )
        .expect("valid tableau")
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self) -> &SmallDense {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn stiffly_accurate(&self) -> bool {
        self.stiffly_accurate
    }

    pub fn explicit_first_stage(&self) -> bool {
        self.explicit_first_stage
    }

    /// Index of the first stage that needs a solve.
    fn first_implicit(&self) -> usize {
        usize::from(self.explicit_first_stage)
    }

    /// Stage count after eliminating an explicit first stage (m′).
    pub fn implicit_stages(&self) -> usize {
        self.stages() - self.first_implicit()
    }

    /// Coefficients among the implicit stages, `m′ × m′`.
    pub fn a_impl(&self) -> SmallDense {
        let o = self.first_implicit();
        let mp = self.implicit_stages();
        let mut out = SmallDense::zeros(mp, mp);
        for i in 0..mp {
            for j in 0..=i {
                out.set(i, j, self.a.get(i + o, j + o));
            }
        }
        out
    }

    /// Couplings `a_{i,1}` of the implicit stages to the eliminated explicit
    /// stage; all zero without elimination.
    pub fn explicit_coupling(&self) -> Vec<f64> {
        if self.explicit_first_stage {
            (1..self.stages()).map(|i| self.a.get(i, 0)).collect()
        } else {
            vec![0.0; self.stages()]
        }
    }

    /// Nodes of the implicit stages.
    pub fn c_impl(&self) -> Vec<f64> {
        self.c[self.first_implicit()..].to_vec()
    }
}

/// Named tableau choices accepted by configuration files.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TableauKind {
    Theta(f64),
    ImplicitEuler,
    CrankNicolson,
    Sdirk2,
}

impl TableauKind {
    pub fn build(self) -> Result<ButcherTableau> {
        match self {
            Self::Theta(t) => ButcherTableau::theta(t),
            Self::ImplicitEuler => Ok(ButcherTableau::implicit_euler()),
            Self::CrankNicolson => Ok(ButcherTableau::crank_nicolson()),
            Self::Sdirk2 => Ok(ButcherTableau::sdirk2()),
        }
    }
}

impl std::str::FromStr for TableauKind {
    type Err = Error;

    /// `implicit_euler`, `crank_nicolson`, `sdirk2`, `theta:<value>` or `theta(<value>)`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "implicit_euler" | "ie" => return Ok(Self::ImplicitEuler),
            "crank_nicolson" | "cn" => return Ok(Self::CrankNicolson),
            "sdirk2" => return Ok(Self::Sdirk2),
            _ => {}
        }
        let arg = t
            .strip_prefix("theta:")
            .or_else(|| t.strip_prefix("theta(").and_then(|r| r.strip_suffix(')')));
        if let Some(v) = arg {
            let th: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad theta value '{v}'")))?;
            if !(th > 0.0 && th <= 1.0) {
                return Err(Error::Config(format!("theta must lie in (0, 1], got {th}")));
            }
            return Ok(Self::Theta(th));
        }
        Err(Error::Config(format!("unknown tableau '{s}'")))
    }
}

impl std::fmt::Display for TableauKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Theta(t) => write!(f, "theta:{t}"),
            Self::ImplicitEuler => f.write_str("implicit_euler"),
            Self::CrankNicolson => f.write_str("crank_nicolson"),
            Self::Sdirk2 => f.write_str("sdirk2"),
        }
    }
}

/// Stage position `ι(n, k)` of the `k`-th stage counted from the start of
/// step `n`, wrapping into later steps; stages are 1-based.
pub fn iota(n: usize, k: usize, m: usize) -> (usize, usize) {
    assert!(k >= 1 && m >= 1, "iota needs k >= 1 and m >= 1");
    (n + (k - 1) / m, (k - 1) % m + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags() {
        let cn = ButcherTableau::crank_nicolson();
        assert!(cn.stiffly_accurate() && cn.explicit_first_stage());
        assert_eq!(cn.implicit_stages(), 1);
        let sd = ButcherTableau::sdirk2();
        assert!(sd.stiffly_accurate() && !sd.explicit_first_stage());
        let gl = ButcherTableau::new(vec![vec![0.5]], vec![1.0], vec![0.5]).unwrap();
        assert!(!gl.stiffly_accurate());
    }

    #[test]
    fn rejects_upper_entries() {
        assert!(ButcherTableau::new(vec![vec![1.0, 1.0], vec![0.0, 1.0]], vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn iota_values() {
        assert_eq!(iota(0, 1, 3), (0, 1));
        assert_eq!(iota(0, 4, 3), (1, 1));
        assert_eq!(iota(2, 3, 3), (2, 3));
        assert_eq!(iota(5, 7, 1), (11, 1));
    }

    #[test]
    fn parse_tableaus() {
        assert_eq!("theta:0.5".parse::<TableauKind>().unwrap(), TableauKind::Theta(0.5));
        assert_eq!("theta(1)".parse::<TableauKind>().unwrap(), TableauKind::Theta(1.0));
        assert!("theta:0".parse::<TableauKind>().is_err());
        assert!("rk4".parse::<TableauKind>().is_err());
    }
}
