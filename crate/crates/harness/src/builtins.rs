//! Named groups, symbols, measures and functions that configs can refer to.

use std::f64::consts::PI;

use translab::calculus::sector_pullback;
use translab::scalar::cplx;
use translab::{CMatrix64, Exponent64, GridSpec64, GroupModel64, Measure64, SectorFunction64, StripFunction64, C64};

use crate::config::{ConfigError, Section};

/// Parses `3`, `-2.5i`, `i`, `0.3-1e-2i`, `1+2i`.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err("empty number".into());
    }
    let bad = || format!("not a complex number: `{s}`");
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|x| cplx(x, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        v => v.parse::<f64>().map_err(|_| bad())?,
    };
    let re = re.parse::<f64>().map_err(|_| bad())?;
    Ok(cplx(re, im))
}

/// `name` or `name(a, b; c, d)`: the name and the `;`-separated argument groups.
fn parse_call(s: &str) -> Result<(String, Vec<Vec<String>>), String> {
    let s = s.trim();
    let Some(open) = s.find('(') else {
        return Ok((s.to_owned(), Vec::new()));
    };
    let inner = s[open + 1..].strip_suffix(')').ok_or_else(|| format!("missing `)` in `{s}`"))?;
    let groups = inner
        .split(';')
        .map(|g| g.split(',').map(|a| a.trim().to_owned()).filter(|a| !a.is_empty()).collect())
        .collect();
    Ok((s[..open].trim().to_owned(), groups))
}

fn reals(args: &[Vec<String>], defaults: &[f64], name: &str) -> Result<Vec<f64>, String> {
    let flat: Vec<&String> = args.iter().flatten().collect();
    if flat.len() > defaults.len() {
        return Err(format!("`{name}` takes at most {} arguments", defaults.len()));
    }
    let mut out = defaults.to_vec();
    for (slot, a) in out.iter_mut().zip(flat) {
        *slot = a.parse().map_err(|_| format!("`{name}`: bad argument `{a}`"))?;
    }
    Ok(out)
}

fn single_complex(args: &[Vec<String>], default: C64, name: &str) -> Result<C64, String> {
    let flat: Vec<&String> = args.iter().flatten().collect();
    match flat.as_slice() {
        [] => Ok(default),
        [a] => parse_complex(a),
        _ => Err(format!("`{name}` takes one argument")),
    }
}

/// The function `a(t)` of a multiplication group.
#[derive(Clone, Debug, PartialEq)]
pub enum SymbolSpec {
    /// `slope·t + offset`
    Affine { slope: f64, offset: f64 },
    /// `amplitude·sin(frequency·t)`
    Sine { amplitude: f64, frequency: f64 },
    /// `low` for `t < 0`, `high` otherwise.
    Step { low: f64, high: f64 },
}

impl SymbolSpec {
    pub fn parse(s: &str) -> Result<Self, String> {
        let (name, args) = parse_call(s)?;
        match name.as_str() {
            "affine" => {
                let v = reals(&args, &[1.0, 0.0], "affine")?;
                Ok(Self::Affine { slope: v[0], offset: v[1] })
            }
            "sine" => {
                let v = reals(&args, &[1.0, 1.0], "sine")?;
                Ok(Self::Sine { amplitude: v[0], frequency: v[1] })
            }
            "step" => {
                let v = reals(&args, &[-1.0, 1.0], "step")?;
                Ok(Self::Step { low: v[0], high: v[1] })
            }
            other => Err(format!("unknown symbol `{other}` (affine, sine, step)")),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Self::Affine { slope, offset } => slope * t + offset,
            Self::Sine { amplitude, frequency } => amplitude * (frequency * t).sin(),
            Self::Step { low, high } => {
                if t < 0.0 {
                    low
                } else {
                    high
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GroupSpec {
    Shift,
    Mult(SymbolSpec),
    Matrix(Vec<Vec<C64>>),
}

impl GroupSpec {
    /// Reads `group`, plus `symbol` or `matrix` as needed.
    pub fn from_section(sec: &Section) -> Result<Option<Self>, ConfigError> {
        let Some(g) = sec.get("group") else {
            return Ok(None);
        };
        let need = |key: &str| sec.get(key).ok_or_else(|| ConfigError::at(g.line, Some(key), format!("`group = {}` needs `{key}`", g.value)));
        match g.value.as_str() {
            "shift" => Ok(Some(Self::Shift)),
            "mult" => {
                let e = need("symbol")?;
                SymbolSpec::parse(&e.value).map(|s| Some(Self::Mult(s))).map_err(|m| ConfigError::at(e.line, Some("symbol"), m))
            }
            "matrix" => {
                let e = need("matrix")?;
                parse_matrix(&e.value).map(|m| Some(Self::Matrix(m))).map_err(|m| ConfigError::at(e.line, Some("matrix"), m))
            }
            other => Err(ConfigError::at(g.line, Some("group"), format!("unknown group `{other}` (shift, mult, matrix)"))),
        }
    }

    pub fn build(&self, spec: GridSpec64, p: Exponent64) -> Result<GroupModel64, String> {
        match self {
            Self::Shift => Ok(GroupModel64::shift(spec, p)),
            Self::Mult(sym) => {
                let sym = sym.clone();
                Ok(GroupModel64::multiplication(spec, move |t| sym.eval(t), p))
            }
            Self::Matrix(rows) => CMatrix64::from_rows(rows).map(|a| GroupModel64::matrix(a, p)).map_err(|e| e.to_string()),
        }
    }
}

/// Rows separated by `;`, entries by spaces or commas; `jordan(n, λ)` and
/// `diag(λ₁, …)` are accepted as shorthands.
pub fn parse_matrix(s: &str) -> Result<Vec<Vec<C64>>, String> {
    let t = s.trim();
    if t.starts_with("jordan") || t.starts_with("diag") {
        let (name, args) = parse_call(t)?;
        let flat: Vec<&String> = args.iter().flatten().collect();
        return match name.as_str() {
            "jordan" => {
                let [n, l] = flat.as_slice() else {
                    return Err("jordan(n, λ) takes two arguments".into());
                };
                let n: usize = n.parse().map_err(|_| format!("bad block size `{n}`"))?;
                let l = parse_complex(l)?;
                Ok((0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| {
                                if i == j {
                                    l
                                } else if j == i + 1 {
                                    cplx(1.0, 0.0)
                                } else {
                                    cplx(0.0, 0.0)
                                }
                            })
                            .collect()
                    })
                    .collect())
            }
            _ => {
                let d: Vec<C64> = flat.iter().map(|a| parse_complex(a)).collect::<Result<_, _>>()?;
                Ok((0..d.len()).map(|i| (0..d.len()).map(|j| if i == j { d[i] } else { cplx(0.0, 0.0) }).collect()).collect())
            }
        };
    }
    let rows: Vec<Vec<C64>> = t
        .split(';')
        .map(|r| r.split(|c: char| c == ',' || c.is_whitespace()).filter(|e| !e.is_empty()).map(parse_complex).collect())
        .collect::<Result<_, _>>()?;
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(format!("matrix must be square, got {n} rows of lengths {:?}", rows.iter().map(Vec::len).collect::<Vec<_>>()));
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq)]
pub enum MeasureSpec {
    Dirac(f64),
    /// Centered Gaussian density truncated to `[−half, half]`, lattice step `h`.
    Gaussian { variance: f64, half: f64, h: f64 },
    Atoms(Vec<(f64, C64)>),
}

impl MeasureSpec {
    pub fn parse(s: &str) -> Result<Self, String> {
        let (name, args) = parse_call(s)?;
        match name.as_str() {
            "dirac" => Ok(Self::Dirac(reals(&args, &[0.0], "dirac")?[0])),
            "gaussian" => {
                let v = reals(&args, &[1.0, 8.0, 1.0 / 64.0], "gaussian")?;
                Ok(Self::Gaussian { variance: v[0], half: v[1], h: v[2] })
            }
            "atoms" => {
                let atoms = args
                    .iter()
                    .flatten()
                    .map(|a| {
                        let (pos, w) = a.split_once(':').ok_or_else(|| format!("atom `{a}` is not `position:weight`"))?;
                        Ok((pos.trim().parse::<f64>().map_err(|_| format!("bad position `{pos}`"))?, parse_complex(w)?))
                    })
                    .collect::<Result<Vec<_>, String>>()?;
                Ok(Self::Atoms(atoms))
            }
            other => Err(format!("unknown measure `{other}` (dirac, gaussian, atoms)")),
        }
    }

    pub fn build(&self) -> Result<Measure64, String> {
        match self {
            Self::Dirac(a) => Ok(Measure64::dirac(*a)),
            Self::Gaussian { variance, half, h } => Measure64::gaussian(*variance, *half, *h).map_err(|e| e.to_string()),
            Self::Atoms(a) => Measure64::from_atoms(a.clone()).map_err(|e| e.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FunctionSpec {
    TauK(f64),
    /// `(λ − z)^{−1}`
    InvShift(C64),
    Gauss,
    Const(C64),
    /// Ratio of polynomials in `w` (ascending coefficients) on a sector of half-angle `psi`.
    SectorRational { num: Vec<C64>, den: Vec<C64>, psi: f64 },
}

impl FunctionSpec {
    pub fn parse(s: &str) -> Result<Self, String> {
        let (name, args) = parse_call(s)?;
        match name.as_str() {
            "tau_k" | "tau" => Ok(Self::TauK(reals(&args, &[4.0], "tau_k")?[0])),
            "inv_shift" => Ok(Self::InvShift(single_complex(&args, cplx(0.0, 2.0), "inv_shift")?)),
            "gauss" => Ok(Self::Gauss),
            "const" => Ok(Self::Const(single_complex(&args, cplx(1.0, 0.0), "const")?)),
            "sector_rational" => {
                let (num, den, psi) = match args.as_slice() {
                    [n, d] => (n, d, PI / 2.0),
                    [n, d, p] if p.len() == 1 => (n, d, p[0].parse::<f64>().map_err(|_| format!("bad angle `{}`", p[0]))?),
                    _ => return Err("sector_rational(num…; den…[; ψ])".into()),
                };
                let parse = |v: &Vec<String>| v.iter().map(|a| parse_complex(a)).collect::<Result<Vec<_>, _>>();
                Ok(Self::SectorRational { num: parse(num)?, den: parse(den)?, psi })
            }
            other => Err(format!("unknown function `{other}` (tau_k, inv_shift, gauss, const, sector_rational)")),
        }
    }

    pub fn sector(&self) -> Option<Result<(SectorFunction64, f64), String>> {
        match self {
            Self::SectorRational { num, den, psi } => {
                Some(SectorFunction64::rational(num.clone(), den.clone()).map(|f| (f, *psi)).map_err(|e| e.to_string()))
            }
            _ => None,
        }
    }

    /// The function on a strip; sector functions are pulled back by `exp`.
    pub fn strip(&self) -> Result<StripFunction64, String> {
        match self {
            Self::TauK(k) => Ok(StripFunction64::tau(*k)),
            Self::InvShift(l) => Ok(StripFunction64::inv_shift(*l)),
            Self::Gauss => Ok(StripFunction64::gauss()),
            Self::Const(c) => Ok(StripFunction64::constant(*c)),
            Self::SectorRational { .. } => {
                let (f, psi) = self.sector().expect("sector variant")?;
                sector_pullback(&f, psi).map_err(|e| e.to_string())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("3").unwrap(), cplx(3.0, 0.0));
        assert_eq!(parse_complex("-2.5i").unwrap(), cplx(0.0, -2.5));
        assert_eq!(parse_complex("i").unwrap(), cplx(0.0, 1.0));
        assert_eq!(parse_complex("0.3-1e-2i").unwrap(), cplx(0.3, -0.01));
        assert_eq!(parse_complex("1 + 2i").unwrap(), cplx(1.0, 2.0));
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn matrices() {
        let m = parse_matrix("1 2; 0, -1i").unwrap();
        assert_eq!(m[1][1], cplx(0.0, -1.0));
        assert!(parse_matrix("1 2; 3").is_err());
        let j = parse_matrix("jordan(3, 0.5)").unwrap();
        assert_eq!((j[0][1], j[1][1], j[2][0]), (cplx(1.0, 0.0), cplx(0.5, 0.0), cplx(0.0, 0.0)));
        assert_eq!(parse_matrix("diag(1, 2i)").unwrap()[1][1], cplx(0.0, 2.0));
    }

    #[test]
    fn named_builtins() {
        assert_eq!(SymbolSpec::parse("sine(2, 0.5)").unwrap().eval(PI), 2.0 * (0.5 * PI).sin());
        assert_eq!(SymbolSpec::parse("step").unwrap().eval(-1.0), -1.0);
        assert!(SymbolSpec::parse("cubic").is_err());
        assert_eq!(MeasureSpec::parse("atoms(0.5:1, -1:2i)").unwrap(), MeasureSpec::Atoms(vec![(0.5, cplx(1.0, 0.0)), (-1.0, cplx(0.0, 2.0))]));
        assert_eq!(FunctionSpec::parse("tau_k(8)").unwrap(), FunctionSpec::TauK(8.0));
        assert_eq!(FunctionSpec::parse("inv_shift(2i)").unwrap(), FunctionSpec::InvShift(cplx(0.0, 2.0)));
        let f = FunctionSpec::parse("sector_rational(1; 1, 1; 1.2)").unwrap().strip().unwrap();
        // 1/(1+e^z) at z = 0
        assert!((f.eval(cplx(0.0, 0.0)) - cplx(0.5, 0.0)).norm() < 1e-15);
    }
}
