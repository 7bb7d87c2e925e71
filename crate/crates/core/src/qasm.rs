//! OpenQASM 2.0 export and a parser for the subset this crate emits.
//!
//! Only `u1`, `u2`, `u3`, and `cx` appear in output. Angles that are small
//! rational multiples of π are printed symbolically (`pi/4`, `-3*pi/8`);
//! anything else is printed as a shortest round-trip float, so
//! parse(export(c)) reproduces every angle exactly or to float precision.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::circuit::{Circuit, Gate};
use crate::{Error, Result};

/// Largest denominator tried when printing angles as fractions of π.
const MAX_DENOMINATOR: i64 = 64;

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Formats an angle, preferring `p*pi/q` with small `q`.
fn format_angle(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    for q in 1..=MAX_DENOMINATOR {
        let p = (x * q as f64 / PI).round();
        if p.abs() > 1e6 {
            continue;
        }
        if (x - p * PI / q as f64).abs() < 1e-12 {
            let (mut p, mut q) = (p as i64, q);
            if p == 0 {
                return "0".into();
            }
            let g = gcd(p, q);
            p /= g;
            q /= g;
            let num = match p {
                1 => "pi".into(),
                -1 => "-pi".into(),
                _ => format!("{p}*pi"),
            };
            return if q == 1 { num } else { format!("{num}/{q}") };
        }
    }
    // Debug formatting for f64 is the shortest string that round-trips.
    format!("{x:?}")
}

/// Serializes a lowered circuit. Unlowered macros are an error.
pub fn export(circuit: &Circuit) -> Result<String> {
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\n");
    out.push_str("include \"qelib1.inc\";\n");
    let _ = writeln!(out, "qreg q[{}];", circuit.n_qubits);
    for g in &circuit.gates {
        match g {
            Gate::U1 { q, lambda } => {
                let _ = writeln!(out, "u1({}) q[{q}];", format_angle(*lambda));
            }
            Gate::U2 { q, phi, lambda } => {
                let _ = writeln!(
                    out,
                    "u2({},{}) q[{q}];",
                    format_angle(*phi),
                    format_angle(*lambda)
                );
            }
            Gate::U3 { q, theta, phi, lambda } => {
                let _ = writeln!(
                    out,
                    "u3({},{},{}) q[{q}];",
                    format_angle(*theta),
                    format_angle(*phi),
                    format_angle(*lambda)
                );
            }
            Gate::Cx { c, t } => {
                let _ = writeln!(out, "cx q[{c}],q[{t}];");
            }
            Gate::Macro { kind, .. } => {
                return Err(Error::InvalidCircuit(format!(
                    "cannot export unlowered macro {}",
                    kind.name()
                )))
            }
        }
    }
    Ok(out)
}

/// Evaluates an angle expression: `[-]term[*pi][/den]` where `term` is a
/// float literal or `pi`.
fn parse_angle(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || Error::arg(format!("bad angle expression {s:?}"));
    let (sign, rest) = match s.strip_prefix('-') {
        Some(r) => (-1.0, r.trim()),
        None => (1.0, s),
    };
    let (mut value, mut rest) = if let Some(r) = rest.strip_prefix("pi") {
        (PI, r.trim())
    } else {
        // Longest float prefix (digits, dot, exponent).
        let mut end = 0;
        let bytes = rest.as_bytes();
        while end < bytes.len() {
            let c = bytes[end] as char;
            let in_exponent = end > 0 && matches!(bytes[end - 1] as char, 'e' | 'E');
            if c.is_ascii_digit()
                || c == '.'
                || c == 'e'
                || c == 'E'
                || (in_exponent && (c == '+' || c == '-'))
            {
                end += 1;
            } else {
                break;
            }
        }
        let lit = &rest[..end];
        let v: f64 = lit.parse().map_err(|_| bad())?;
        (v, rest[end..].trim())
    };
    if let Some(r) = rest.strip_prefix('*') {
        let r = r.trim();
        rest = r.strip_prefix("pi").ok_or_else(bad)?.trim();
        value *= PI;
    }
    if let Some(r) = rest.strip_prefix('/') {
        let den: f64 = r.trim().parse().map_err(|_| bad())?;
        if den == 0.0 {
            return Err(bad());
        }
        value /= den;
        rest = "";
    }
    if !rest.is_empty() {
        return Err(bad());
    }
    Ok(sign * value)
}

/// Extracts the index from an operand like `q[3]`.
fn parse_operand(s: &str, reg: &str) -> Result<usize> {
    let s = s.trim();
    let inner = s
        .strip_prefix(reg)
        .and_then(|r| r.trim().strip_prefix('['))
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| Error::arg(format!("bad operand {s:?}")))?;
    inner
        .trim()
        .parse()
        .map_err(|_| Error::arg(format!("bad qubit index in {s:?}")))
}

/// Parses the subset of OpenQASM 2.0 produced by [`export`]: one `qreg`,
/// gates `u1`/`u2`/`u3`/`cx`, comments and blank lines ignored.
pub fn parse(text: &str) -> Result<Circuit> {
    let mut reg_name: Option<String> = None;
    let mut circuit: Option<Circuit> = None;
    let mut saw_version = false;

    for raw in text.lines() {
        let line = match raw.find("//") {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let stmt = line
            .strip_suffix(';')
            .ok_or_else(|| Error::arg(format!("missing semicolon: {line:?}")))?
            .trim();

        if let Some(rest) = stmt.strip_prefix("OPENQASM") {
            if rest.trim() != "2.0" {
                return Err(Error::arg(format!("unsupported OPENQASM version {rest:?}")));
            }
            saw_version = true;
            continue;
        }
        if stmt.starts_with("include") {
            continue;
        }
        if let Some(rest) = stmt.strip_prefix("qreg") {
            if circuit.is_some() {
                return Err(Error::arg("multiple qreg declarations"));
            }
            let rest = rest.trim();
            let open = rest.find('[').ok_or_else(|| Error::arg("bad qreg"))?;
            let close = rest.find(']').ok_or_else(|| Error::arg("bad qreg"))?;
            let name = rest[..open].trim().to_string();
            let n: usize = rest[open + 1..close]
                .trim()
                .parse()
                .map_err(|_| Error::arg("bad qreg size"))?;
            reg_name = Some(name);
            circuit = Some(Circuit::new(n));
            continue;
        }

        let circuit_ref = circuit
            .as_mut()
            .ok_or_else(|| Error::arg("gate before qreg declaration"))?;
        let reg = reg_name.as_deref().unwrap();

        let (head, operands) = match stmt.find(')') {
            Some(close) => {
                let open =
                    stmt.find('(').ok_or_else(|| Error::arg(format!("bad gate {stmt:?}")))?;
                (
                    (stmt[..open].trim(), Some(&stmt[open + 1..close])),
                    stmt[close + 1..].trim(),
                )
            }
            None => {
                let sp =
                    stmt.find(' ').ok_or_else(|| Error::arg(format!("bad gate {stmt:?}")))?;
                ((stmt[..sp].trim(), None), stmt[sp + 1..].trim())
            }
        };
        let (name, args) = head;
        let angles: Vec<f64> = match args {
            Some(a) => a
                .split(',')
                .map(parse_angle)
                .collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        let qubits: Vec<usize> = operands
            .split(',')
            .map(|o| parse_operand(o, reg))
            .collect::<Result<Vec<_>>>()?;
        for &q in &qubits {
            if q >= circuit_ref.n_qubits {
                return Err(Error::arg(format!(
                    "qubit {q} outside register of {}",
                    circuit_ref.n_qubits
                )));
            }
        }

        let gate = match (name, angles.len(), qubits.len()) {
            ("u1", 1, 1) => Gate::U1 { q: qubits[0], lambda: angles[0] },
            ("u2", 2, 1) => Gate::U2 { q: qubits[0], phi: angles[0], lambda: angles[1] },
            ("u3", 3, 1) => Gate::U3 {
                q: qubits[0],
                theta: angles[0],
                phi: angles[1],
                lambda: angles[2],
            },
            ("cx", 0, 2) => {
                if qubits[0] == qubits[1] {
                    return Err(Error::arg("cx control equals target"));
                }
                Gate::Cx { c: qubits[0], t: qubits[1] }
            }
            _ => return Err(Error::arg(format!("unsupported statement {stmt:?}"))),
        };
        circuit_ref.push(gate);
    }

    if !saw_version {
        return Err(Error::arg("missing OPENQASM 2.0 header"));
    }
    circuit.ok_or_else(|| Error::arg("missing qreg declaration"))
}
