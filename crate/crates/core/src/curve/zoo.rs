use std::f64::consts::{PI, TAU};
use std::fmt;

use rand::Rng;

use super::KnotCurve;
use crate::plat::Plat;
use crate::{rng, KnotError, Result, Vec3};

const DEFAULT_SAMPLES: usize = 256;

/// One harmonic of a Fourier knot: `cos(k t)·cos + sin(k t)·sin`, per coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierTerm {
    pub k: u32,
    pub cos: [f64; 3],
    pub sin: [f64; 3],
}

#[derive(Clone, Debug, PartialEq)]
pub enum ZooFamily {
    Circle { r: f64 },
    Ellipse { a: f64, b: f64 },
    /// ((R + r cos qt) cos 2t, (R + r cos qt) sin 2t, r sin qt)
    Torus2q { q: u32, big_r: f64, r: f64 },
    Twist { k: usize },
    Fourier { terms: Vec<FourierTerm> },
    /// Unit circle plus one seeded mode-`mode` wobble split between the radial and vertical directions.
    PerturbedCircle { amplitude: f64, mode: u32, seed: u64 },
}

/// A named curve family and its sample count.
///
/// Text form: `family:key=value,...,n=N`, for example `torus2q:q=3,R=2,r=1,n=512`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZooSpec {
    pub family: ZooFamily,
    pub samples: usize,
}

impl ZooSpec {
    pub fn circle(r: f64, samples: usize) -> Self {
        Self {
            family: ZooFamily::Circle { r },
            samples,
        }
    }

    pub fn trefoil(samples: usize) -> Self {
        Self {
            family: ZooFamily::Torus2q {
                q: 3,
                big_r: 2.0,
                r: 1.0,
            },
            samples,
        }
    }

    /// x = (2 + cos 2t) cos 3t, y = (2 + cos 2t) sin 3t, z = sin 4t.
    pub fn figure_eight(samples: usize) -> Self {
        let term = |k, cos, sin| FourierTerm { k, cos, sin };
        Self {
            family: ZooFamily::Fourier {
                terms: vec![
                    term(1, [0.5, 0.0, 0.0], [0.0, 0.5, 0.0]),
                    term(3, [2.0, 0.0, 0.0], [0.0, 2.0, 0.0]),
                    term(4, [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]),
                    term(5, [0.5, 0.0, 0.0], [0.0, 0.5, 0.0]),
                ],
            },
            samples,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        // `trefoil,n=512` is accepted as shorthand for `trefoil:n=512`
        let (name, args) = text
            .split_once(':')
            .or_else(|| text.split_once(','))
            .unwrap_or((text, ""));
        let name = name.trim();
        let mut kv = Vec::new();
        for part in args.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| bad(text, format!("`{part}` is not key=value")))?;
            kv.push((k.trim(), v.trim()));
        }
        let mut samples = DEFAULT_SAMPLES;
        let mut rest = Vec::new();
        for (k, v) in kv {
            if k == "n" {
                samples = v.parse().map_err(|_| bad(text, format!("bad n `{v}`")))?;
            } else {
                rest.push((k, v));
            }
        }
        let mut args = Args { text, kv: rest };
        let family = match name {
            "circle" => ZooFamily::Circle {
                r: args.float("r", 1.0)?,
            },
            "ellipse" => ZooFamily::Ellipse {
                a: args.float("a", 2.0)?,
                b: args.float("b", 1.0)?,
            },
            "torus2q" | "trefoil" => ZooFamily::Torus2q {
                q: args.int("q", 3)? as u32,
                big_r: args.float("R", 2.0)?,
                r: args.float("r", 1.0)?,
            },
            "twist" => ZooFamily::Twist {
                k: args.int("k", 1)? as usize,
            },
            "figure-eight" | "figure8" => Self::figure_eight(samples).family,
            "fourier" => {
                if let Some(preset) = args.take("preset") {
                    match preset {
                        "figure-eight" | "figure8" => Self::figure_eight(samples).family,
                        "trefoil" => ZooFamily::Fourier {
                            terms: trefoil_terms(),
                        },
                        _ => return Err(bad(text, format!("unknown preset `{preset}`"))),
                    }
                } else {
                    ZooFamily::Fourier {
                        terms: args.fourier_terms()?,
                    }
                }
            }
            "perturbed_circle" => ZooFamily::PerturbedCircle {
                amplitude: args.float("amp", 0.1)?,
                mode: args.int("mode", 5)? as u32,
                seed: args.int("seed", 1)?,
            },
            _ => return Err(bad(text, format!("unknown family `{name}`"))),
        };
        if let Some((k, _)) = args.kv.first() {
            return Err(bad(text, format!("unknown key `{k}`")));
        }
        let spec = Self { family, samples };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(KnotError::InvalidCurve(m));
        if self.samples < super::MIN_SAMPLES {
            return fail(format!("n must be at least {}", super::MIN_SAMPLES));
        }
        let positive = |v: f64| v.is_finite() && v > 0.0;
        match &self.family {
            ZooFamily::Circle { r } if !positive(*r) => fail("r must be positive".into()),
            ZooFamily::Ellipse { a, b } if !positive(*a) || !positive(*b) => {
                fail("a and b must be positive".into())
            }
            ZooFamily::Torus2q { q, big_r, r } => {
                if *q < 3 || q % 2 == 0 {
                    fail(format!("q must be odd and at least 3, got {q}"))
                } else if !positive(*big_r) || !positive(*r) {
                    fail("R and r must be positive".into())
                } else {
                    Ok(())
                }
            }
            ZooFamily::Twist { k } if *k == 0 => fail("k must be positive".into()),
            ZooFamily::Fourier { terms } if terms.is_empty() => fail("no Fourier terms".into()),
            ZooFamily::PerturbedCircle {
                amplitude, mode, ..
            } => {
                if !(amplitude.is_finite() && *amplitude >= 0.0 && *amplitude < 0.5) {
                    fail("amp must lie in [0, 0.5)".into())
                } else if *mode < 2 {
                    fail("mode must be at least 2".into())
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// Builds the curve: a dense evaluation of the family, resampled to
    /// `samples` points equally spaced in arclength and checked for embeddedness.
    pub fn sample(&self) -> Result<KnotCurve> {
        self.validate()?;
        let n = self.samples;
        let dense_n = (16 * n).max(4096);
        let dense: Vec<Vec3> = match &self.family {
            ZooFamily::Twist { k } => Plat::twist(*k)?.polyline(64),
            family => {
                let f = self.param_fn(family);
                (0..dense_n)
                    .map(|i| f(TAU * i as f64 / dense_n as f64))
                    .collect()
            }
        };
        KnotCurve::build(dense)?.resample_arclength(n)
    }

    fn param_fn(&self, family: &ZooFamily) -> Box<dyn Fn(f64) -> Vec3> {
        match family.clone() {
            ZooFamily::Circle { r } => Box::new(move |t| Vec3::new(r * t.cos(), r * t.sin(), 0.0)),
            ZooFamily::Ellipse { a, b } => Box::new(move |t| Vec3::new(a * t.cos(), b * t.sin(), 0.0)),
            ZooFamily::Torus2q { q, big_r, r } => Box::new(move |t| {
                let q = f64::from(q);
                let rho = big_r + r * (q * t).cos();
                Vec3::new(rho * (2.0 * t).cos(), rho * (2.0 * t).sin(), r * (q * t).sin())
            }),
            ZooFamily::Fourier { terms } => Box::new(move |t| {
                terms.iter().fold(Vec3::zeros(), |acc, term| {
                    let kt = f64::from(term.k) * t;
                    acc + Vec3::from(term.cos) * kt.cos() + Vec3::from(term.sin) * kt.sin()
                })
            }),
            ZooFamily::PerturbedCircle {
                amplitude,
                mode,
                seed,
            } => {
                let mut g = rng::stream(seed, 0);
                let psi = g.random_range(PI / 8.0..3.0 * PI / 8.0);
                let phase_r = g.random_range(0.0..TAU);
                let phase_z = g.random_range(0.0..TAU);
                let m = f64::from(mode);
                Box::new(move |t| {
                    let radial = Vec3::new(t.cos(), t.sin(), 0.0);
                    let wobble = radial * (psi.cos() * (m * t + phase_r).cos())
                        + Vec3::z() * (psi.sin() * (m * t + phase_z).sin());
                    radial + wobble * amplitude
                })
            }
            ZooFamily::Twist { .. } => unreachable!("twist knots are built from plats"),
        }
    }
}

fn trefoil_terms() -> Vec<FourierTerm> {
    // x = sin t + 2 sin 2t, y = cos t − 2 cos 2t, z = −sin 3t
    vec![
        FourierTerm {
            k: 1,
            cos: [0.0, 1.0, 0.0],
            sin: [1.0, 0.0, 0.0],
        },
        FourierTerm {
            k: 2,
            cos: [0.0, -2.0, 0.0],
            sin: [2.0, 0.0, 0.0],
        },
        FourierTerm {
            k: 3,
            cos: [0.0, 0.0, 0.0],
            sin: [0.0, 0.0, -1.0],
        },
    ]
}

fn bad(text: &str, msg: String) -> KnotError {
    KnotError::InvalidCurve(format!("zoo spec `{text}`: {msg}"))
}

struct Args<'a> {
    text: &'a str,
    kv: Vec<(&'a str, &'a str)>,
}

impl<'a> Args<'a> {
    fn take(&mut self, key: &str) -> Option<&'a str> {
        let pos = self.kv.iter().position(|(k, _)| *k == key)?;
        Some(self.kv.remove(pos).1)
    }

    fn float(&mut self, key: &str, default: f64) -> Result<f64> {
        match self.take(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| bad(self.text, format!("bad {key} `{v}`"))),
        }
    }

    fn int(&mut self, key: &str, default: u64) -> Result<u64> {
        match self.take(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| bad(self.text, format!("bad {key} `{v}`"))),
        }
    }

    /// Keys like `cx3=2` (coefficient of cos 3t in x) or `sz4=1`.
    fn fourier_terms(&mut self) -> Result<Vec<FourierTerm>> {
        let mut terms: Vec<FourierTerm> = Vec::new();
        let kv = std::mem::take(&mut self.kv);
        for (key, v) in kv {
            let mut chars = key.chars();
            let (kind, axis) = (chars.next(), chars.next());
            let k: Option<u32> = chars.as_str().parse().ok();
            let axis = match axis {
                Some('x') => 0,
                Some('y') => 1,
                Some('z') => 2,
                _ => {
                    self.kv.push((key, v));
                    continue;
                }
            };
            let (Some(kind @ ('c' | 's')), Some(k)) = (kind, k) else {
                self.kv.push((key, v));
                continue;
            };
            let value: f64 = v.parse().map_err(|_| bad(self.text, format!("bad {key} `{v}`")))?;
            let idx = match terms.iter().position(|t| t.k == k) {
                Some(i) => i,
                None => {
                    terms.push(FourierTerm {
                        k,
                        cos: [0.0; 3],
                        sin: [0.0; 3],
                    });
                    terms.len() - 1
                }
            };
            if kind == 'c' {
                terms[idx].cos[axis] = value;
            } else {
                terms[idx].sin[axis] = value;
            }
        }
        terms.sort_by_key(|t| t.k);
        Ok(terms)
    }
}

impl fmt::Display for ZooSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.samples;
        match &self.family {
            ZooFamily::Circle { r } => write!(f, "circle:r={r},n={n}"),
            ZooFamily::Ellipse { a, b } => write!(f, "ellipse:a={a},b={b},n={n}"),
            ZooFamily::Torus2q { q, big_r, r } => write!(f, "torus2q:q={q},R={big_r},r={r},n={n}"),
            ZooFamily::Twist { k } => write!(f, "twist:k={k},n={n}"),
            ZooFamily::Fourier { terms } => {
                f.write_str("fourier:")?;
                for t in terms {
                    for (axis, name) in ['x', 'y', 'z'].iter().enumerate() {
                        if t.cos[axis] != 0.0 {
                            write!(f, "c{name}{}={},", t.k, t.cos[axis])?;
                        }
                        if t.sin[axis] != 0.0 {
                            write!(f, "s{name}{}={},", t.k, t.sin[axis])?;
                        }
                    }
                }
                write!(f, "n={n}")
            }
            ZooFamily::PerturbedCircle {
                amplitude,
                mode,
                seed,
            } => write!(f, "perturbed_circle:amp={amplitude},mode={mode},seed={seed},n={n}"),
        }
    }
}

impl std::str::FromStr for ZooSpec {
    type Err = KnotError;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_examples() {
        let s = ZooSpec::parse("torus2q:q=3,R=2,r=1,n=512").unwrap();
        assert_eq!(s, ZooSpec::trefoil(512));
        assert_eq!(ZooSpec::parse("circle:r=1,n=256").unwrap(), ZooSpec::circle(1.0, 256));
        assert_eq!(ZooSpec::parse("figure-eight:n=64").unwrap(), ZooSpec::figure_eight(64));
        assert_eq!(
            ZooSpec::parse("fourier:preset=figure-eight,n=64").unwrap(),
            ZooSpec::figure_eight(64)
        );
        assert_eq!(
            ZooSpec::parse("fourier:cx1=0.5,sy1=0.5,cx3=2,sy3=2,sz4=1,cx5=0.5,sy5=0.5,n=64").unwrap(),
            ZooSpec::figure_eight(64)
        );
    }

    #[test]
    fn display_round_trips() {
        for text in [
            "circle:r=1.5,n=64",
            "ellipse:a=2,b=1,n=128",
            "torus2q:q=5,R=2,r=0.5,n=300",
            "twist:k=3,n=200",
            "perturbed_circle:amp=0.05,mode=7,seed=1,n=256",
        ] {
            assert_eq!(ZooSpec::parse(text).unwrap().to_string(), text);
        }
        let f8 = ZooSpec::figure_eight(64);
        assert_eq!(ZooSpec::parse(&f8.to_string()).unwrap(), f8);
    }

    #[test]
    fn rejects_bad_specs() {
        for text in [
            "torus2q:q=4",
            "circle:r=-1",
            "circle:n=8",
            "circle:radius=2",
            "hexagon",
            "perturbed_circle:mode=1",
            "twist:k=0",
            "ellipse:a=x",
        ] {
            assert!(ZooSpec::parse(text).is_err(), "{text}");
        }
    }

    #[test]
    fn circle_length() {
        let c = ZooSpec::circle(1.0, 256).sample().unwrap();
        assert!((c.total_length() - TAU).abs() < 1e-3);
        assert_eq!(c.len(), 256);
    }

    #[test]
    fn ellipse_length_converges() {
        // Ramanujan's second approximation is accurate to ~1e-10 for a/b = 2
        let (a, b) = (2.0f64, 1.0f64);
        let h = ((a - b) / (a + b)).powi(2);
        let exact = PI * (a + b) * (1.0 + 3.0 * h / (10.0 + (4.0 - 3.0 * h).sqrt()));
        let coarse = ZooSpec::parse("ellipse:a=2,b=1,n=64").unwrap().sample().unwrap();
        let fine = coarse.resample_arclength(512).unwrap();
        assert!((fine.total_length() - exact).abs() < 1e-3 * exact);
    }

    #[test]
    fn every_family_samples() {
        for text in [
            "torus2q:q=3,R=2,r=1,n=512",
            "torus2q:q=7,n=256",
            "twist:k=1,n=128",
            "twist:k=4,n=256",
            "figure-eight:n=128",
            "fourier:preset=trefoil,n=128",
            "perturbed_circle:amp=0.05,mode=7,seed=1,n=256",
        ] {
            let c = ZooSpec::parse(text).unwrap().sample().unwrap();
            assert!(c.min_segment_gap().0 > 0.0, "{text}");
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = ZooSpec::parse("perturbed_circle:amp=0.1,mode=5,seed=9,n=128").unwrap();
        assert_eq!(spec.sample().unwrap().points(), spec.sample().unwrap().points());
        let other = ZooSpec::parse("perturbed_circle:amp=0.1,mode=5,seed=10,n=128").unwrap();
        assert_ne!(spec.sample().unwrap().points(), other.sample().unwrap().points());
    }
}
