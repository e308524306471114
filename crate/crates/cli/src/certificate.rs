//! Machine-readable verification certificates.

use pencil_lab::jsonio::to_pair;
use pencil_lab::scalar::C64;
use pencil_lab::tol;
use serde::Serialize;

/// Gate values the suites compare against; each can be overridden with
/// `--tol name=value`.
#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub roots: f64,
    pub gram: f64,
    pub round_trip: f64,
    pub gauge: f64,
    pub homogeneity: f64,
    pub rescale: f64,
    pub bracket: f64,
    pub drift: f64,
    pub dual: f64,
    pub encoding: f64,
    pub membership: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            roots: tol::MATCH_TOL,
            gram: tol::GRAM_RESIDUAL,
            round_trip: tol::ROUND_TRIP,
            gauge: tol::GAUGE_REL,
            homogeneity: tol::HOMOGENEITY,
            rescale: tol::RESCALE,
            bracket: tol::BRACKET_REL,
            drift: tol::DRIFT_REL,
            dual: tol::DUAL_DIVISOR,
            encoding: tol::ENCODING_FIT,
            membership: tol::MEMBERSHIP,
        }
    }
}

impl Tolerances {
    /// Applies one `name=value` override.
    pub fn apply(&mut self, entry: &str) -> Result<(), String> {
        let (name, value) = entry
            .split_once('=')
            .ok_or_else(|| format!("tolerance override must be name=value, got {entry:?}"))?;
        let parsed: f64 = value
            .trim()
            .parse()
            .map_err(|_| format!("bad tolerance value in {entry:?}"))?;
        if !(parsed.is_finite() && parsed > 0.0) {
            return Err(format!("tolerance must be a positive number, got {entry:?}"));
        }
        let slot = match name.trim() {
            "roots" => &mut self.roots,
            "gram" => &mut self.gram,
            "round-trip" | "round_trip" => &mut self.round_trip,
            "gauge" => &mut self.gauge,
            "homogeneity" => &mut self.homogeneity,
            "rescale" => &mut self.rescale,
            "bracket" => &mut self.bracket,
            "drift" => &mut self.drift,
            "dual" => &mut self.dual,
            "encoding" => &mut self.encoding,
            "membership" => &mut self.membership,
            other => return Err(format!("unknown tolerance name {other:?}")),
        };
        *slot = parsed;
        Ok(())
    }
}

/// One check's outcome.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    /// The mathematical claim the check exercises.
    pub anchor: String,
    pub samples: usize,
    pub max_residual: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRecord {
    pub fn new(name: &str, anchor: &str, samples: usize, max_residual: f64, pass: bool) -> Self {
        CheckRecord {
            name: name.into(),
            anchor: anchor.into(),
            samples,
            // JSON cannot carry infinities; the clamp keeps failed records
            // numeric while staying unmistakably out of tolerance.
            max_residual: if max_residual.is_finite() {
                max_residual
            } else {
                f64::MAX
            },
            pass,
            note: None,
        }
    }

    pub fn with_note(mut self, note: String) -> Self {
        self.note = Some(note);
        self
    }
}

#[derive(Debug, Serialize)]
pub struct ConfigEcho {
    pub n: usize,
    pub mu: Vec<[f64; 2]>,
    pub mu_exact: Vec<String>,
    pub seed: u64,
    pub samples: usize,
    pub suite: String,
    pub tolerances: Tolerances,
}

#[derive(Debug, Serialize)]
pub struct Certificate {
    pub schema: u32,
    pub config: ConfigEcho,
    pub checks: Vec<CheckRecord>,
    pub overall_pass: bool,
    pub wall_time_seconds: f64,
}

impl Certificate {
    pub fn assemble(
        n: usize,
        mu: &[C64],
        mu_exact: Vec<String>,
        seed: u64,
        samples: usize,
        suite: String,
        tolerances: Tolerances,
        mut checks: Vec<CheckRecord>,
        wall_time_seconds: f64,
    ) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let overall_pass = checks.iter().all(|c| c.pass);
        Certificate {
            schema: 1,
            config: ConfigEcho {
                n,
                mu: mu.iter().map(to_pair).collect(),
                mu_exact,
                seed,
                samples,
                suite,
                tolerances,
            },
            checks,
            overall_pass,
            wall_time_seconds,
        }
    }
}
