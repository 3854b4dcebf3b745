//! Molecular absorption as Beer–Lambert transmittance over a tabulated
//! absorption coefficient.

use std::io::Read;

use thiserror::Error;

/// Bundled table: 110–170 GHz at 0.5 GHz steps, T = 296 K, 50 % relative
/// humidity, p = 101325 Pa.
pub const DEFAULT_TABLE_CSV: &str = include_str!("../data/dband_standard_atmosphere.csv");

const HEADER: [&str; 2] = ["frequency_hz", "kappa_per_m"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AtmosphereError {
    #[error("frequency {frequency_hz} Hz outside the absorption table domain [{min_hz}, {max_hz}] Hz ([{:.3}, {:.3}] GHz)", min_hz / 1e9, max_hz / 1e9)]
    OutOfDomain {
        frequency_hz: f64,
        min_hz: f64,
        max_hz: f64,
    },
    #[error("path length {0} m must be finite and >= 0")]
    NegativeDistance(f64),
    #[error("absorption table line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("absorption table is empty")]
    Empty,
    #[error("absorption table needs at least two samples, got {0}")]
    TooFewSamples(usize),
    #[error("invalid atmosphere state: {0}")]
    BadState(String),
    #[error("vacuum domain [{0}, {1}] Hz must satisfy 0 <= f_min < f_max")]
    BadDomain(f64, f64),
    #[error("I/O error reading absorption table: {0}")]
    Io(String),
}

/// Conditions a table was generated for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtmosphereState {
    pub temperature_k: f64,
    pub pressure_pa: f64,
    pub relative_humidity: f64,
}

impl AtmosphereState {
    pub fn new(temperature_k: f64, pressure_pa: f64, relative_humidity: f64) -> Result<Self, AtmosphereError> {
        if !(temperature_k > 0.0 && temperature_k.is_finite()) {
            return Err(AtmosphereError::BadState(format!(
                "temperature {temperature_k} K must be > 0"
            )));
        }
        if !(pressure_pa > 0.0 && pressure_pa.is_finite()) {
            return Err(AtmosphereError::BadState(format!(
                "pressure {pressure_pa} Pa must be > 0"
            )));
        }
        if !(0.0..=1.0).contains(&relative_humidity) {
            return Err(AtmosphereError::BadState(format!(
                "relative humidity {relative_humidity} outside [0, 1]"
            )));
        }
        Ok(Self {
            temperature_k,
            pressure_pa,
            relative_humidity,
        })
    }

    /// 296 K, 101325 Pa, 50 % relative humidity.
    pub fn standard() -> Self {
        Self {
            temperature_k: 296.0,
            pressure_pa: 101_325.0,
            relative_humidity: 0.5,
        }
    }
}

impl std::fmt::Display for AtmosphereState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "T={} K, p={} Pa, RH={}",
            self.temperature_k, self.pressure_pa, self.relative_humidity
        )
    }
}

/// Piecewise-linear absorption coefficient `κ(f)` in 1/m.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsorptionSpectrum {
    frequencies: Vec<f64>,
    kappa: Vec<f64>,
    state: Option<AtmosphereState>,
}

/// `κ` resolved at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Absorption {
    pub kappa_per_m: f64,
}

impl Absorption {
    /// `exp(−κ·d)`; `d` is not validated here.
    #[inline]
    pub fn transmittance(&self, distance_m: f64) -> f64 {
        (-self.kappa_per_m * distance_m).exp()
    }
}

impl AbsorptionSpectrum {
    /// Builds a spectrum from `(frequency_hz, kappa_per_m)` samples, which
    /// must be strictly increasing in frequency with non-negative `κ`.
    pub fn new(samples: Vec<(f64, f64)>, state: Option<AtmosphereState>) -> Result<Self, AtmosphereError> {
        if samples.is_empty() {
            return Err(AtmosphereError::Empty);
        }
        if samples.len() < 2 {
            return Err(AtmosphereError::TooFewSamples(samples.len()));
        }
        for (i, &(f, k)) in samples.iter().enumerate() {
            let line = i as u64 + 1;
            if !(f.is_finite() && f >= 0.0) {
                return Err(AtmosphereError::Parse {
                    line,
                    message: format!("frequency {f} must be finite and >= 0"),
                });
            }
            if !(k.is_finite() && k >= 0.0) {
                return Err(AtmosphereError::Parse {
                    line,
                    message: format!("kappa {k} must be finite and >= 0"),
                });
            }
            if i > 0 && f <= samples[i - 1].0 {
                return Err(AtmosphereError::Parse {
                    line,
                    message: format!("frequency {f} not strictly above previous {}", samples[i - 1].0),
                });
            }
        }
        let (frequencies, kappa) = samples.into_iter().unzip();
        Ok(Self {
            frequencies,
            kappa,
            state,
        })
    }

    /// `κ ≡ 0` on `[f_min, f_max]`.
    pub fn vacuum(f_min: f64, f_max: f64) -> Result<Self, AtmosphereError> {
        if !(f_min >= 0.0 && f_min < f_max && f_max.is_finite()) {
            return Err(AtmosphereError::BadDomain(f_min, f_max));
        }
        Self::new(vec![(f_min, 0.0), (f_max, 0.0)], None)
    }

    /// The bundled standard-atmosphere D-band table.
    pub fn standard_dband() -> Self {
        Self::load(DEFAULT_TABLE_CSV.as_bytes()).expect("bundled absorption table is valid")
    }

    /// Parses the `frequency_hz,kappa_per_m` CSV format. `#` lines are
    /// comments; `# temperature_k=…`, `# pressure_pa=…` and
    /// `# relative_humidity=…` comments populate the atmosphere state.
    pub fn load<R: Read>(mut source: R) -> Result<Self, AtmosphereError> {
        let mut text = String::new();
        source
            .read_to_string(&mut text)
            .map_err(|e| AtmosphereError::Io(e.to_string()))?;
        let state = parse_state_comments(&text)?;

        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .has_headers(true)
            .from_reader(text.as_bytes());
        let header_line = text
            .lines()
            .position(|l| !l.trim_start().starts_with('#') && !l.trim().is_empty())
            .map(|i| i as u64 + 1);
        let Some(header_line) = header_line else {
            return Err(AtmosphereError::Empty);
        };
        let headers = reader.headers().map_err(|e| AtmosphereError::Parse {
            line: header_line,
            message: e.to_string(),
        })?;
        if headers.iter().collect::<Vec<_>>() != HEADER {
            return Err(AtmosphereError::Parse {
                line: header_line,
                message: format!(
                    "expected header `{}`, found `{}`",
                    HEADER.join(","),
                    headers.iter().collect::<Vec<_>>().join(",")
                ),
            });
        }

        let mut samples: Vec<(f64, f64)> = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| AtmosphereError::Parse {
                line: e.position().map(|p| p.line()).unwrap_or(0),
                message: e.to_string(),
            })?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            let field = |i: usize, name: &str| -> Result<f64, AtmosphereError> {
                record
                    .get(i)
                    .ok_or_else(|| AtmosphereError::Parse {
                        line,
                        message: format!("missing {name}"),
                    })?
                    .parse::<f64>()
                    .map_err(|e| AtmosphereError::Parse {
                        line,
                        message: format!("{name}: {e}"),
                    })
            };
            let f = field(0, "frequency_hz")?;
            let k = field(1, "kappa_per_m")?;
            if !(k >= 0.0 && k.is_finite()) {
                return Err(AtmosphereError::Parse {
                    line,
                    message: format!("kappa_per_m {k} must be finite and >= 0"),
                });
            }
            if !(f >= 0.0 && f.is_finite()) {
                return Err(AtmosphereError::Parse {
                    line,
                    message: format!("frequency_hz {f} must be finite and >= 0"),
                });
            }
            if let Some(&(prev, _)) = samples.last() {
                if f <= prev {
                    return Err(AtmosphereError::Parse {
                        line,
                        message: format!("frequency_hz {f} not strictly above previous row {prev}"),
                    });
                }
            }
            samples.push((f, k));
        }
        if samples.is_empty() {
            return Err(AtmosphereError::Empty);
        }
        Self::new(samples, state)
    }

    pub fn state(&self) -> Option<&AtmosphereState> {
        self.state.as_ref()
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.frequencies[0], *self.frequencies.last().unwrap())
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.frequencies.iter().copied().zip(self.kappa.iter().copied())
    }

    pub fn is_vacuum(&self) -> bool {
        self.kappa.iter().all(|&k| k == 0.0)
    }

    /// Resolves `κ(f)` by linear interpolation; table nodes are returned verbatim.
    pub fn at(&self, frequency_hz: f64) -> Result<Absorption, AtmosphereError> {
        let (lo, hi) = self.domain();
        if !(lo..=hi).contains(&frequency_hz) {
            return Err(AtmosphereError::OutOfDomain {
                frequency_hz,
                min_hz: lo,
                max_hz: hi,
            });
        }
        let kappa_per_m = match self.frequencies.binary_search_by(|f| f.total_cmp(&frequency_hz)) {
            Ok(i) => self.kappa[i],
            Err(i) => {
                // lo < f < hi, so 1 <= i < len
                let (f0, f1) = (self.frequencies[i - 1], self.frequencies[i]);
                let (k0, k1) = (self.kappa[i - 1], self.kappa[i]);
                let t = (frequency_hz - f0) / (f1 - f0);
                k0 + (k1 - k0) * t
            }
        };
        Ok(Absorption { kappa_per_m })
    }

    pub fn kappa(&self, frequency_hz: f64) -> Result<f64, AtmosphereError> {
        self.at(frequency_hz).map(|a| a.kappa_per_m)
    }

    /// `τ(f, d) = exp(−κ(f)·d)`.
    pub fn transmittance(&self, frequency_hz: f64, distance_m: f64) -> Result<f64, AtmosphereError> {
        if !(distance_m >= 0.0 && distance_m.is_finite()) {
            return Err(AtmosphereError::NegativeDistance(distance_m));
        }
        Ok(self.at(frequency_hz)?.transmittance(distance_m))
    }
}

fn parse_state_comments(text: &str) -> Result<Option<AtmosphereState>, AtmosphereError> {
    let mut t = None;
    let mut p = None;
    let mut rh = None;
    for line in text.lines() {
        let Some(comment) = line.trim_start().strip_prefix('#') else {
            continue;
        };
        let Some((key, value)) = comment.split_once('=') else {
            continue;
        };
        let slot = match key.trim() {
            "temperature_k" => &mut t,
            "pressure_pa" => &mut p,
            "relative_humidity" => &mut rh,
            _ => continue,
        };
        *slot = value.trim().parse::<f64>().ok();
    }
    match (t, p, rh) {
        (Some(t), Some(p), Some(rh)) => AtmosphereState::new(t, p, rh).map(Some),
        _ => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_row() -> AbsorptionSpectrum {
        AbsorptionSpectrum::load("frequency_hz,kappa_per_m\n110e9,1e-4\n170e9,3e-4\n".as_bytes()).unwrap()
    }

    #[test]
    fn zero_path_is_transparent() {
        let s = AbsorptionSpectrum::standard_dband();
        for f in [110e9, 137.3e9, 170e9] {
            assert_eq!(s.transmittance(f, 0.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn vacuum_is_transparent() {
        let s = AbsorptionSpectrum::vacuum(110e9, 170e9).unwrap();
        assert_eq!(s.transmittance(140e9, 1e6).unwrap(), 1.0);
        assert_eq!(s.transmittance(110e9, 3.0).unwrap(), 1.0);
        assert!(s.is_vacuum());
        assert!(AbsorptionSpectrum::vacuum(170e9, 110e9).is_err());
    }

    #[test]
    fn analytic_exponential() {
        let s = AbsorptionSpectrum::new(vec![(100e9, 0.01), (200e9, 0.01)], None).unwrap();
        let tau = s.transmittance(150e9, 100.0).unwrap();
        assert!((tau - (-1f64).exp()).abs() < 1e-15);
        assert!((tau - 0.3679).abs() < 1e-4);
    }

    #[test]
    fn two_row_table_interpolates_linearly() {
        let s = two_row();
        assert_eq!(s.domain(), (110e9, 170e9));
        assert!((s.kappa(140e9).unwrap() - 2e-4).abs() < 1e-18);
        assert_eq!(s.kappa(110e9).unwrap(), 1e-4);
        assert_eq!(s.kappa(170e9).unwrap(), 3e-4);
    }

    #[test]
    fn node_queries_are_bit_exact() {
        let s = AbsorptionSpectrum::standard_dband();
        for (f, k) in s.samples().collect::<Vec<_>>() {
            assert_eq!(s.kappa(f).unwrap().to_bits(), k.to_bits());
            assert_eq!(s.transmittance(f, 2.5).unwrap().to_bits(), (-k * 2.5).exp().to_bits());
        }
    }

    #[test]
    fn out_of_domain_is_rejected() {
        let s = AbsorptionSpectrum::standard_dband();
        let err = s.transmittance(100e9, 1.0).unwrap_err();
        assert!(matches!(err, AtmosphereError::OutOfDomain { .. }));
        assert!(err.to_string().contains("[110.000, 170.000] GHz"), "{err}");
        assert!(s.transmittance(170.0001e9, 1.0).is_err());
        assert!(matches!(
            s.transmittance(140e9, -1.0),
            Err(AtmosphereError::NegativeDistance(_))
        ));
    }

    #[test]
    fn bundled_table_metadata_and_range() {
        let s = AbsorptionSpectrum::standard_dband();
        assert_eq!(s.state(), Some(&AtmosphereState::standard()));
        assert_eq!(s.samples().count(), 121);
        // roughly 1–3 dB/km across the band
        for (_, k) in s.samples() {
            let db_per_km = 10.0 * std::f64::consts::E.log10() * k * 1e3;
            assert!((0.5..5.0).contains(&db_per_km), "{db_per_km}");
        }
    }

    #[test]
    fn load_errors_carry_line_numbers() {
        assert_eq!(
            AbsorptionSpectrum::load("".as_bytes()).unwrap_err(),
            AtmosphereError::Empty
        );
        assert_eq!(
            AbsorptionSpectrum::load("# only a comment\nfrequency_hz,kappa_per_m\n".as_bytes()).unwrap_err(),
            AtmosphereError::Empty
        );

        let err = AbsorptionSpectrum::load("frequency_hz,kappa_per_m\n110e9,1e-4\n120e9,-1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, AtmosphereError::Parse { line: 3, .. }), "{err:?}");

        let err =
            AbsorptionSpectrum::load("# c\nfrequency_hz,kappa_per_m\n120e9,1e-4\n110e9,1e-4\n".as_bytes()).unwrap_err();
        assert!(matches!(err, AtmosphereError::Parse { line: 4, .. }), "{err:?}");

        let err =
            AbsorptionSpectrum::load("frequency_hz,kappa_per_m\n110e9,1e-4\n110e9,2e-4\n".as_bytes()).unwrap_err();
        assert!(matches!(err, AtmosphereError::Parse { line: 3, .. }), "{err:?}");

        let err = AbsorptionSpectrum::load("frequency_hz,kappa_per_m\n110e9,abc\n".as_bytes()).unwrap_err();
        assert!(matches!(err, AtmosphereError::Parse { line: 2, .. }), "{err:?}");

        let err = AbsorptionSpectrum::load("freq,kappa\n110e9,1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, AtmosphereError::Parse { line: 1, .. }), "{err:?}");

        let err = AbsorptionSpectrum::load("frequency_hz,kappa_per_m\n110e9,1e-4,7\n".as_bytes()).unwrap_err();
        assert!(matches!(err, AtmosphereError::Parse { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn single_row_is_rejected() {
        let err = AbsorptionSpectrum::load("frequency_hz,kappa_per_m\n110e9,1e-4\n".as_bytes()).unwrap_err();
        assert_eq!(err, AtmosphereError::TooFewSamples(1));
    }
}
