use std::fmt;

use super::schedule::LevelSchedule;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The constraint is soft: downstream formulas stay computable.
    Warning,
    /// A limit statement that no finite truncation can settle.
    Unverifiable,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Warning => "warning",
            CheckStatus::Unverifiable => "unverifiable at finite truncation",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub status: CheckStatus,
    pub hard: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} ({})", self.name, self.status, self.detail)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    /// `N_{i+1}/N_i` over the truncated schedule.
    pub growth_ratios: Vec<f64>,
    /// `-ln p / ln A` and `-ln(1-q) / ln B`.
    pub separation: (f64, f64),
}

impl ValidationReport {
    pub fn first_hard_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| c.hard && c.status == CheckStatus::Fail)
    }

    pub fn hard_ok(&self) -> bool {
        self.first_hard_failure().is_none()
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let ratios: Vec<String> = self.growth_ratios.iter().map(|r| format!("{r:.6e}")).collect();
        writeln!(f, "growth ratios N[i+1]/N[i]: [{}]", ratios.join(", "))
    }
}

pub const CHECK_ORDER: &str = "A > B > 2";
pub const CHECK_P: &str = "0 < p <= 1/2";
pub const CHECK_Q: &str = "0 < q <= 1/2";
pub const CHECK_SEPARATION: &str = "-ln p/ln A < -ln(1-q)/ln B";
pub const CHECK_GROWTH: &str = "N[i+1]/N[i] -> infinity";

/// Reports every model constraint; never fails.
pub fn validate(a: f64, b: f64, p: f64, q: f64, schedule: &LevelSchedule) -> ValidationReport {
    let mut checks = Vec::new();
    let pass = |ok: bool| if ok { CheckStatus::Pass } else { CheckStatus::Fail };

    let order_ok = a.is_finite() && b.is_finite() && a > b && b > 2.0;
    let order_detail = if a > b { format!("A = {a}, B = {b}") } else { format!("A = {a} is not > B = {b}") };
    checks.push(Check { name: CHECK_ORDER, status: pass(order_ok), hard: true, detail: order_detail });
    checks.push(Check { name: CHECK_P, status: pass(p > 0.0 && p <= 0.5), hard: true, detail: format!("p = {p}") });
    checks.push(Check { name: CHECK_Q, status: pass(q > 0.0 && q <= 0.5), hard: true, detail: format!("q = {q}") });

    let lhs = -p.ln() / a.ln();
    let rhs = -(1.0 - q).ln() / b.ln();
    let sep_ok = lhs < rhs;
    checks.push(Check {
        name: CHECK_SEPARATION,
        status: if sep_ok { CheckStatus::Pass } else { CheckStatus::Warning },
        hard: false,
        detail: format!("{lhs:.7} {} {rhs:.7}", if sep_ok { "<" } else { ">=" }),
    });

    let growth_ratios = schedule.growth_ratios();
    let increasing = growth_ratios.windows(2).all(|w| w[1] > w[0]);
    checks.push(Check {
        name: CHECK_GROWTH,
        status: CheckStatus::Unverifiable,
        hard: false,
        detail: format!(
            "{} ratios over {} breakpoints, last {:.3e}, {}",
            growth_ratios.len(),
            schedule.breakpoints().len(),
            growth_ratios.last().copied().unwrap_or(f64::NAN),
            if increasing { "increasing" } else { "not increasing" }
        ),
    });

    ValidationReport { checks, growth_ratios, separation: (lhs, rhs) }
}
