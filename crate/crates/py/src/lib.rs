//! Python bindings. Character values are returned as their text form
//! (e.g. `"-1 - z5^1"`); reports as JSON strings.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use depthzero::charformulas::RegularMember;
use depthzero::endoscopy;
use depthzero::sweep::{self, Mode, SweepConfig};
use depthzero::torus::sample_regular;
use depthzero::{
    CharacterEngine, CharacterLevel, Classification, CycNumber, Error, FieldConfig, Klein4Element,
    PacketSpec, TorusVariant,
};

fn py_err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn text(x: depthzero::Result<CycNumber>) -> PyResult<String> {
    x.map(|v| v.simplify().to_string()).map_err(py_err)
}

#[pyclass(name = "FieldConfig", frozen)]
struct PyFieldConfig {
    inner: FieldConfig,
}

#[pymethods]
impl PyFieldConfig {
    #[new]
    #[pyo3(signature = (p, precision, eps=None))]
    fn new(p: u64, precision: u32, eps: Option<u64>) -> PyResult<Self> {
        let inner = match eps {
            Some(e) => FieldConfig::with_eps(p, precision, e),
            None => FieldConfig::new(p, precision),
        }
        .map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn p(&self) -> u64 {
        self.inner.p()
    }

    #[getter]
    fn precision(&self) -> u32 {
        self.inner.precision()
    }

    #[getter]
    fn eps(&self) -> u64 {
        self.inner.eps()
    }

    fn __repr__(&self) -> String {
        format!(
            "FieldConfig(p={}, precision={}, eps={})",
            self.inner.p(),
            self.inner.precision(),
            self.inner.eps()
        )
    }
}

fn parse_class(class: &str) -> PyResult<Classification> {
    match class {
        "near" => Ok(Classification::Near),
        "far" => Ok(Classification::Far),
        "anti_near" => Ok(Classification::AntiNear),
        _ => Err(PyValueError::new_err(format!("unknown class {class:?}"))),
    }
}

#[pyclass(name = "TorusElement", frozen)]
struct PyTorusElement {
    inner: depthzero::TorusElement,
}

#[pymethods]
impl PyTorusElement {
    #[new]
    #[pyo3(signature = (cfg, a, b, conjugated=false))]
    fn new(cfg: &PyFieldConfig, a: i64, b: i64, conjugated: bool) -> PyResult<Self> {
        let variant = if conjugated {
            TorusVariant::Conjugated
        } else {
            TorusVariant::Unramified
        };
        depthzero::TorusElement::from_ints(&cfg.inner, a, b, variant)
            .map(|inner| Self { inner })
            .map_err(py_err)
    }

    /// A regular element with the given class (`"near"`, `"far"`, `"anti_near"`) and `v(b)`.
    #[staticmethod]
    fn sample(cfg: &PyFieldConfig, class: &str, valuation: u32, seed: u64) -> PyResult<Self> {
        sample_regular(&cfg.inner, parse_class(class)?, valuation, seed)
            .map(|inner| Self { inner })
            .map_err(py_err)
    }

    #[getter]
    fn a(&self) -> i64 {
        self.inner.a().centered()
    }

    #[getter]
    fn b(&self) -> i64 {
        self.inner.b().centered()
    }

    #[getter]
    fn conjugated(&self) -> bool {
        self.inner.variant() == TorusVariant::Conjugated
    }

    fn classify(&self) -> PyResult<String> {
        self.inner.classify().map(|c| c.to_string()).map_err(py_err)
    }

    fn valuation_b(&self) -> PyResult<u32> {
        self.inner.valuation_b().map_err(py_err)
    }

    /// `f = (-q)^{v(b)}`.
    fn f(&self) -> PyResult<i64> {
        self.inner.f_direct().map_err(py_err)
    }

    fn f_via_disc(&self) -> PyResult<i64> {
        self.inner.f_via_disc().map_err(py_err)
    }

    fn invert(&self) -> Self {
        Self {
            inner: self.inner.invert(),
        }
    }

    fn g_conjugate(&self) -> Self {
        Self {
            inner: self.inner.g_conjugate(),
        }
    }

    fn __repr__(&self) -> String {
        format!("TorusElement({})", self.inner)
    }
}

fn parse_packet(packet: &str, cfg: &FieldConfig) -> PyResult<PacketSpec> {
    if packet == "nonregular" {
        return Ok(PacketSpec::NonRegular);
    }
    let k = packet
        .strip_prefix("regular:")
        .and_then(|k| k.parse().ok())
        .ok_or_else(|| {
            PyValueError::new_err(format!(
                "packet must be regular:K or nonregular, got {packet:?}"
            ))
        })?;
    PacketSpec::regular(k, cfg).map_err(py_err)
}

fn parse_s(s: &str) -> PyResult<Klein4Element> {
    s.parse().map_err(py_err)
}

#[pyclass(name = "CharacterEngine", frozen)]
struct PyCharacterEngine {
    inner: CharacterEngine,
}

#[pymethods]
impl PyCharacterEngine {
    #[new]
    fn new(cfg: &PyFieldConfig) -> Self {
        Self {
            inner: CharacterEngine::new(cfg.inner),
        }
    }

    /// `Theta_{pi+}` (`member="plus"`) or `Theta_{pi-}` of the regular packet of level `k`.
    fn theta_regular(&self, member: &str, k: i64, gamma: &PyTorusElement) -> PyResult<String> {
        let member = match member {
            "plus" => RegularMember::Plus,
            "minus" => RegularMember::Minus,
            _ => return Err(PyValueError::new_err(format!("unknown member {member:?}"))),
        };
        let level = CharacterLevel::regular(k, self.inner.config()).map_err(py_err)?;
        text(self.inner.theta_regular(member, level, &gamma.inner))
    }

    fn theta_nonregular_far(&self, j: usize, gamma: &PyTorusElement) -> PyResult<String> {
        text(self.inner.theta_nonregular_far(j, &gamma.inner))
    }

    fn theta_nonregular_near_sums(&self, gamma: &PyTorusElement) -> PyResult<(String, String)> {
        let (a, b) = self
            .inner
            .theta_nonregular_near_sums(&gamma.inner)
            .map_err(py_err)?;
        Ok((a.to_string(), b.to_string()))
    }

    fn theta_virtual(&self, packet: &str, s: &str, gamma: &PyTorusElement) -> PyResult<String> {
        let packet = parse_packet(packet, self.inner.config())?;
        text(self.inner.theta_virtual(packet, parse_s(s)?, &gamma.inner))
    }

    fn theta5(&self, gamma: &PyTorusElement) -> PyResult<String> {
        text(self.inner.theta5(&gamma.inner))
    }

    fn psi0(&self, gamma: &PyTorusElement) -> PyResult<i8> {
        self.inner.psi0(&gamma.inner).map_err(py_err)
    }

    /// The report of one identity check, as a JSON object string.
    fn verify_identity(&self, packet: &str, s: &str, gamma: &PyTorusElement) -> PyResult<String> {
        let packet = parse_packet(packet, self.inner.config())?;
        let report = endoscopy::verify_identity(&self.inner, packet, parse_s(s)?, &gamma.inner);
        Ok(report.to_json_line())
    }

    fn falsify(&self, gamma: &PyTorusElement) -> PyResult<(String, String)> {
        let (a, b) = endoscopy::falsify_adss152(&self.inner, &gamma.inner).map_err(py_err)?;
        Ok((a.to_json_line(), b.to_json_line()))
    }
}

/// `Delta(gamma^H, gamma)` with `gamma^H` the direct avatar of `gamma`.
#[pyfunction]
fn transfer_factor(gamma: &PyTorusElement) -> PyResult<i64> {
    let delta = endoscopy::related_elements(&gamma.inner)[0].1;
    endoscopy::transfer_factor(&delta, &gamma.inner).map_err(py_err)
}

/// Runs a sweep; returns `(exit_code, json_lines)`.
#[pyfunction]
#[pyo3(signature = (mode, primes, precision=8, samples=20, seed=0, packet="nonregular", s="s1", class_="both"))]
#[allow(clippy::too_many_arguments)]
fn run_sweep(
    mode: &str,
    primes: Vec<u64>,
    precision: u32,
    samples: usize,
    seed: u64,
    packet: &str,
    s: &str,
    class_: &str,
) -> PyResult<(i32, Vec<String>)> {
    let mode = match mode {
        "verify" => Mode::Verify,
        "falsify" => Mode::Falsify,
        "properties" => Mode::Properties,
        _ => return Err(PyValueError::new_err(format!("unknown mode {mode:?}"))),
    };
    let config = SweepConfig {
        mode,
        primes,
        precision,
        samples,
        seed,
        packet: packet.parse().map_err(py_err)?,
        s: s.parse().map_err(py_err)?,
        class: class_.parse().map_err(py_err)?,
        ..SweepConfig::default()
    };
    let outcome = sweep::run(&config).map_err(py_err)?;
    let lines = outcome.reports.iter().map(|r| r.to_json_line()).collect();
    Ok((outcome.exit_code(), lines))
}

#[pymodule]
fn depthzero_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFieldConfig>()?;
    m.add_class::<PyTorusElement>()?;
    m.add_class::<PyCharacterEngine>()?;
    m.add_function(wrap_pyfunction!(transfer_factor, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    Ok(())
}
