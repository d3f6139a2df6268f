//! JSON formats for operators, channels, cq-MACs and result records.
//! Writers emit fixed key order and 17-significant-digit floats so equal
//! inputs produce byte-identical output; readers go through serde and
//! report the error location on malformed input.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Deserialize;

use crate::hyptest::HypTestValue;
use crate::linalg::{self, CMat};
use crate::mac::{CqMac, RateRegion};
use crate::op::{DensityOperator, HermitianOperator, QuantumChannel};
use crate::{Error, Result};

/// 17 significant digits; enough to reproduce any f64 bit-exactly.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        // normalize -0.0 so equal values always print identically
        format!("{:.16e}", if x == 0.0 { 0.0 } else { x })
    } else {
        "null".to_string()
    }
}

fn fmt_f(x: f64) -> String {
    fmt_float(x)
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Parse(format!("line {} column {}: {e}", e.line(), e.column()))
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

#[derive(Deserialize)]
struct OperatorJson {
    dims: Vec<usize>,
    /// row-major, entries as [re, im]
    matrix: Vec<Vec<[f64; 2]>>,
}

fn matrix_from_rows(rows: &[Vec<[f64; 2]>]) -> Result<CMat> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Parse("matrix must be square".into()));
    }
    let mut m = CMat::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (j, &[re, im]) in row.iter().enumerate() {
            m[(i, j)] = nalgebra::Complex::new(re, im);
        }
    }
    Ok(m)
}

fn rows_to_json(m: &CMat) -> String {
    let mut out = String::from("[");
    for i in 0..m.nrows() {
        if i > 0 {
            out.push(',');
        }
        out.push('[');
        for j in 0..m.ncols() {
            if j > 0 {
                out.push(',');
            }
            let v = m[(i, j)];
            let _ = write!(out, "[{},{}]", fmt_f(v.re), fmt_f(v.im));
        }
        out.push(']');
    }
    out.push(']');
    out
}

fn operator_from_raw(raw: &OperatorJson) -> Result<HermitianOperator> {
    let m = matrix_from_rows(&raw.matrix)?;
    if linalg::total_dim(&raw.dims) != m.nrows() {
        return Err(Error::Parse(format!(
            "dims {:?} do not multiply to matrix size {}",
            raw.dims,
            m.nrows()
        )));
    }
    HermitianOperator::new(m, raw.dims.clone())
}

pub fn parse_operator(text: &str) -> Result<HermitianOperator> {
    let raw: OperatorJson = serde_json::from_str(text).map_err(json_err)?;
    operator_from_raw(&raw)
}

pub fn parse_density(text: &str) -> Result<DensityOperator> {
    let op = parse_operator(text)?;
    DensityOperator::new(op)
}

pub fn write_operator(op: &HermitianOperator) -> String {
    format!(
        "{{\"dims\":{:?},\"matrix\":{}}}",
        op.dims(),
        rows_to_json(op.matrix())
    )
}

#[derive(Deserialize)]
struct ChannelJson {
    kraus: Vec<Vec<Vec<[f64; 2]>>>,
    in_dims: Vec<usize>,
    out_dims: Vec<usize>,
}

pub fn parse_channel(text: &str) -> Result<QuantumChannel> {
    let raw: ChannelJson = serde_json::from_str(text).map_err(json_err)?;
    channel_from_raw(raw)
}

fn channel_from_raw(raw: ChannelJson) -> Result<QuantumChannel> {
    let din = linalg::total_dim(&raw.in_dims);
    let dout = linalg::total_dim(&raw.out_dims);
    let mut kraus = Vec::with_capacity(raw.kraus.len());
    for rows in &raw.kraus {
        if rows.len() != dout || rows.iter().any(|r| r.len() != din) {
            return Err(Error::Parse(format!(
                "each Kraus operator must be {dout}x{din}"
            )));
        }
        let mut m = CMat::zeros(dout, din);
        for (i, row) in rows.iter().enumerate() {
            for (j, &[re, im]) in row.iter().enumerate() {
                m[(i, j)] = nalgebra::Complex::new(re, im);
            }
        }
        kraus.push(m);
    }
    QuantumChannel::new(kraus, raw.in_dims, raw.out_dims)
}

pub fn write_channel(ch: &QuantumChannel) -> String {
    let mut out = String::from("{\"in_dims\":");
    let _ = write!(out, "{:?},\"kraus\":[", ch.in_dims());
    for (i, k) in ch.kraus().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let mut rows = String::from("[");
        for r in 0..k.nrows() {
            if r > 0 {
                rows.push(',');
            }
            rows.push('[');
            for c in 0..k.ncols() {
                if c > 0 {
                    rows.push(',');
                }
                let v = k[(r, c)];
                let _ = write!(rows, "[{},{}]", fmt_f(v.re), fmt_f(v.im));
            }
            rows.push(']');
        }
        rows.push(']');
        out.push_str(&rows);
    }
    let _ = write!(out, "],\"out_dims\":{:?}}}", ch.out_dims());
    out
}

#[derive(Deserialize)]
struct P2PSpecJson {
    resource: OperatorJson,
    channel: ChannelJson,
    m: usize,
    c: f64,
    test: Option<OperatorJson>,
}

pub fn parse_p2p_spec(text: &str) -> Result<crate::p2p::P2PCodeSpec> {
    let raw: P2PSpecJson = serde_json::from_str(text).map_err(json_err)?;
    Ok(crate::p2p::P2PCodeSpec {
        resource: DensityOperator::new(operator_from_raw(&raw.resource)?)?,
        channel: channel_from_raw(raw.channel)?,
        m: raw.m,
        test: raw.test.as_ref().map(operator_from_raw).transpose()?,
        c: raw.c,
    })
}

#[derive(Deserialize)]
struct MacSpecJson {
    resources: Vec<OperatorJson>,
    channel: ChannelJson,
    sizes: Vec<usize>,
    c: f64,
    test: Option<OperatorJson>,
}

pub fn parse_mac_spec(text: &str) -> Result<crate::mac::MacCodeSpec> {
    let raw: MacSpecJson = serde_json::from_str(text).map_err(json_err)?;
    Ok(crate::mac::MacCodeSpec {
        resources: raw
            .resources
            .iter()
            .map(|r| DensityOperator::new(operator_from_raw(r)?))
            .collect::<Result<_>>()?,
        channel: channel_from_raw(raw.channel)?,
        sizes: raw.sizes,
        test: raw.test.as_ref().map(operator_from_raw).transpose()?,
        c: raw.c,
    })
}

#[derive(Deserialize)]
struct CqMacJson {
    p_x: Vec<f64>,
    p_y: Vec<f64>,
    outputs: BTreeMap<String, OperatorJson>,
}

pub fn parse_cq_mac(text: &str) -> Result<CqMac> {
    let raw: CqMacJson = serde_json::from_str(text).map_err(json_err)?;
    let nx = raw.p_x.len();
    let ny = raw.p_y.len();
    let mut table: Vec<Vec<Option<DensityOperator>>> = vec![vec![None; ny]; nx];
    for (key, op) in &raw.outputs {
        let parts: Vec<&str> = key.split(',').collect();
        let parse_idx = |s: &str| s.trim().parse::<usize>().ok();
        let (x, y) = match parts.as_slice() {
            [a, b] => match (parse_idx(a), parse_idx(b)) {
                (Some(x), Some(y)) => (x, y),
                _ => return Err(Error::Parse(format!("bad output key {key:?}"))),
            },
            _ => return Err(Error::Parse(format!("output key {key:?} must be \"x,y\""))),
        };
        if x >= nx || y >= ny {
            return Err(Error::Parse(format!(
                "output key {key:?} outside {nx}x{ny} alphabet"
            )));
        }
        let m = matrix_from_rows(&op.matrix)?;
        let h = HermitianOperator::new(m, op.dims.clone())?;
        table[x][y] = Some(DensityOperator::new(h)?);
    }
    let mut outputs = Vec::with_capacity(nx);
    for (x, row) in table.into_iter().enumerate() {
        let mut r = Vec::with_capacity(ny);
        for (y, cell) in row.into_iter().enumerate() {
            r.push(cell.ok_or_else(|| Error::Parse(format!("missing output \"{x},{y}\"")))?);
        }
        outputs.push(r);
    }
    CqMac::new(raw.p_x, raw.p_y, outputs)
}

pub fn write_cq_mac(mac: &CqMac) -> String {
    let probs = |p: &[f64]| {
        let items: Vec<String> = p.iter().map(|&v| fmt_f(v)).collect();
        format!("[{}]", items.join(","))
    };
    let mut out = format!(
        "{{\"outputs\":{{",
    );
    let mut first = true;
    for x in 0..mac.p_x.len() {
        for y in 0..mac.p_y.len() {
            if !first {
                out.push(',');
            }
            first = false;
            let _ = write!(
                out,
                "\"{x},{y}\":{}",
                write_operator(mac.outputs[x][y].op())
            );
        }
    }
    let _ = write!(
        out,
        "}},\"p_x\":{},\"p_y\":{}}}",
        probs(&mac.p_x),
        probs(&mac.p_y)
    );
    out
}

pub fn write_hyptest(v: &HypTestValue) -> String {
    format!(
        "{{\"gap\":{},\"type1\":{},\"type2\":{},\"value\":{}}}",
        fmt_f(v.gap),
        fmt_f(v.type1),
        fmt_f(v.type2),
        fmt_f(v.value)
    )
}

#[derive(Deserialize)]
struct HypTestJson {
    gap: f64,
    type1: f64,
    type2: f64,
    value: Option<f64>,
}

pub fn parse_hyptest(text: &str) -> Result<HypTestValue> {
    let raw: HypTestJson = serde_json::from_str(text).map_err(json_err)?;
    Ok(HypTestValue {
        value: raw.value.unwrap_or(f64::INFINITY),
        type1: raw.type1,
        type2: raw.type2,
        gap: raw.gap,
        infinite: raw.value.is_none(),
    })
}

pub fn write_rate_region(region: &RateRegion) -> String {
    let mut out = String::from("{\"constraints\":[");
    for (i, c) in region.constraints.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(
            out,
            "{{\"bound\":{},\"label\":\"{}\",\"senders\":{:?}}}",
            fmt_f(c.bound),
            escape(&c.label),
            c.senders
        );
    }
    out.push_str("]}");
    out
}

/// CSV dump of 2D vertices for plotting: header plus one `r1,r2` row each.
pub fn vertices_csv(points: &[(f64, f64)]) -> String {
    let mut out = String::from("r1,r2\n");
    for &(x, y) in points {
        let _ = writeln!(out, "{},{}", fmt_f(x), fmt_f(y));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cr;
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn operator_roundtrip_bitexact() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let h = random::psd(&mut rng, 4, 1.0).with_dims(vec![2, 2]).unwrap();
        let text = write_operator(&h);
        let back = parse_operator(&text).unwrap();
        assert_eq!(back.dims(), h.dims());
        assert_eq!(back.matrix(), h.matrix());
        // writer is deterministic
        assert_eq!(text, write_operator(&back));
    }

    #[test]
    fn operator_parse_errors_carry_location() {
        let err = parse_operator("{\"dims\":[2],").unwrap_err();
        match err {
            Error::Parse(msg) => assert!(msg.contains("line"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
        // shape mismatch
        assert!(parse_operator("{\"dims\":[3],\"matrix\":[[[1,0]]]}").is_err());
        // non-square
        assert!(
            parse_operator("{\"dims\":[2],\"matrix\":[[[1,0],[0,0]],[[0,0]]]}").is_err()
        );
    }

    #[test]
    fn channel_roundtrip() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let ch = random::channel(&mut rng, 2, 3, 2);
        let text = write_channel(&ch);
        let back = parse_channel(&text).unwrap();
        assert_eq!(back.in_dims(), ch.in_dims());
        assert_eq!(back.out_dims(), ch.out_dims());
        assert_eq!(back.kraus().len(), ch.kraus().len());
        for (a, b) in back.kraus().iter().zip(ch.kraus()) {
            assert_eq!(a, b);
        }
        assert_eq!(text, write_channel(&back));
    }

    #[test]
    fn channel_parse_rejects_noncptp() {
        let text = "{\"kraus\":[[[[1,0],[0,0]],[[0,0],[0,0]]]],\"in_dims\":[2],\"out_dims\":[2]}";
        assert!(parse_channel(text).is_err());
    }

    #[test]
    fn cq_mac_roundtrip() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let outputs: Vec<Vec<DensityOperator>> = (0..2)
            .map(|_| (0..2).map(|_| random::density(&mut rng, 2)).collect())
            .collect();
        let mac = CqMac::new(vec![0.25, 0.75], vec![0.5, 0.5], outputs).unwrap();
        let text = write_cq_mac(&mac);
        let back = parse_cq_mac(&text).unwrap();
        assert_eq!(back.p_x, mac.p_x);
        for x in 0..2 {
            for y in 0..2 {
                assert_eq!(back.outputs[x][y].matrix(), mac.outputs[x][y].matrix());
            }
        }
        assert_eq!(text, write_cq_mac(&back));
    }

    #[test]
    fn cq_mac_missing_cell_rejected() {
        let op = write_operator(
            DensityOperator::pure(&[cr(1.0), cr(0.0)], vec![2]).unwrap().op(),
        );
        let text = format!(
            "{{\"outputs\":{{\"0,0\":{op}}},\"p_x\":[1.0],\"p_y\":[0.5,0.5]}}"
        );
        assert!(parse_cq_mac(&text).is_err());
    }

    #[test]
    fn hyptest_record_roundtrip_including_infinite() {
        let v = HypTestValue {
            value: 1.25,
            type1: 0.1,
            type2: 0.023,
            gap: 1e-9,
            infinite: false,
        };
        let text = write_hyptest(&v);
        let back = parse_hyptest(&text).unwrap();
        assert_eq!(back.value, v.value);
        assert_eq!(back.type2, v.type2);
        let inf = HypTestValue {
            value: f64::INFINITY,
            type1: 0.0,
            type2: 0.0,
            gap: 0.0,
            infinite: true,
        };
        let back = parse_hyptest(&write_hyptest(&inf)).unwrap();
        assert!(back.infinite && back.value.is_infinite());
    }

    #[test]
    fn region_and_csv_writers_deterministic() {
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let omega = random::density_multi(&mut rng, &[2, 2, 2]);
        let region = crate::mac::rate_region_mi(&omega).unwrap();
        let a = write_rate_region(&region);
        let b = write_rate_region(&region);
        assert_eq!(a, b);
        assert!(a.contains("\"senders\":[0, 1]") || a.contains("\"senders\":[0,1]"));
        let csv = vertices_csv(&[(0.0, 0.0), (1.5, 0.25)]);
        assert!(csv.starts_with("r1,r2\n"));
        assert_eq!(csv.lines().count(), 3);
    }
}
