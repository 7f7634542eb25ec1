//! Line-oriented text formats. Blank lines and `#` comments are ignored,
//! except `# role ...` annotations in linking-matrix files. Every parser
//! reports the 1-based line of the first offending directive, and `emit_*`
//! produces the canonical file that its parser reads back unchanged.
//!
//! | kind          | directives                                              |
//! |---------------|---------------------------------------------------------|
//! | modular data  | `conductor n`, `labels k`, `dual ...`, `S i j t`, `theta i t`, `D t` |
//! | graph         | `vertices k`, `edge u v`                                |
//! | linking       | `size m`, `entry i j v`, `# role i K\|a\|b\|c id`       |
//! | metric group  | `orders ...`, `modulus N`, `q x1,...,xk e`              |
//! | cocycle       | `orders ...`, `modulus N`, `omega x\|y\|z e`            |
//! | group         | `orders ...`                                            |
//! | weights       | `weights k`, `A i j t`                                  |
//!
//! Here `t` is a cyclotomic token `n:[c0,...]`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::abelian_gauss::{FinAbGroup, MetricGroup};
use crate::cocycle::Cocycle;
use crate::cyclotomic::CycNum;
use crate::error::{Error, Result};
use crate::graph_manifolds::{Role, SurgeryPresentation};
use crate::graph_partition::{Graph, WeightMatrix};
use crate::modular_data::{ModularData, ModularParts};

struct Directive<'a> {
    line: usize,
    key: &'a str,
    args: Vec<&'a str>,
}

fn directives(text: &str, keep_roles: bool) -> Vec<Directive<'_>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let mut tokens: Vec<&str> = raw.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens[0].starts_with('#') {
            let role = keep_roles && tokens.len() > 1 && tokens[0] == "#" && tokens[1] == "role";
            if !role {
                continue;
            }
            tokens.remove(0);
        }
        out.push(Directive {
            line: i + 1,
            key: tokens[0],
            args: tokens[1..].to_vec(),
        });
    }
    out
}

impl Directive<'_> {
    fn arity(&self, n: usize) -> Result<()> {
        if self.args.len() != n {
            return Err(Error::parse(
                self.line,
                format!("`{}` takes {n} argument(s), found {}", self.key, self.args.len()),
            ));
        }
        Ok(())
    }

    fn num<T: FromStr>(&self, i: usize, what: &str) -> Result<T> {
        self.args[i]
            .parse()
            .map_err(|_| Error::parse(self.line, format!("bad {what} {:?}", self.args[i])))
    }

    fn cyc(&self, i: usize) -> Result<CycNum> {
        CycNum::parse_token(self.args[i]).map_err(|m| Error::parse(self.line, m))
    }

    fn index(&self, i: usize, bound: usize, what: &str) -> Result<usize> {
        let v: usize = self.num(i, what)?;
        if v >= bound {
            return Err(Error::parse(self.line, format!("{what} {v} out of range 0..{bound}")));
        }
        Ok(v)
    }

    fn unknown(&self) -> Error {
        Error::parse(self.line, format!("unknown directive `{}`", self.key))
    }
}

/// Reads a header directive that must come first.
fn header<'a>(ds: &'a [Directive<'a>], key: &str) -> Result<&'a Directive<'a>> {
    match ds.first() {
        Some(d) if d.key == key => Ok(d),
        Some(d) => Err(Error::parse(d.line, format!("expected `{key}`, found `{}`", d.key))),
        None => Err(Error::parse(0, format!("empty file, expected `{key}`"))),
    }
}

/// Fills a slot, rejecting a second conflicting value.
fn set<K: std::hash::Hash + Eq + std::fmt::Debug, V: PartialEq>(
    map: &mut HashMap<K, V>,
    key: K,
    value: V,
    line: usize,
    what: &str,
) -> Result<()> {
    if let Some(old) = map.get(&key) {
        if *old != value {
            return Err(Error::parse(line, format!("{what} {key:?} given twice with different values")));
        }
        return Ok(());
    }
    map.insert(key, value);
    Ok(())
}

// ---------------------------------------------------------------- modular data

pub fn parse_modular_data(text: &str) -> Result<ModularData> {
    let ds = directives(text, false);
    let conductor: u32 = {
        let d = header(&ds, "conductor")?;
        d.arity(1)?;
        d.num(0, "conductor")?
    };
    let mut k: Option<usize> = None;
    let mut dual: Option<Vec<usize>> = None;
    let mut s: HashMap<(usize, usize), CycNum> = HashMap::new();
    let mut theta: HashMap<usize, CycNum> = HashMap::new();
    let mut global_d: Option<CycNum> = None;
    let labels = |k: Option<usize>, d: &Directive| k.ok_or_else(|| Error::parse(d.line, "`labels` must precede entries"));
    for d in &ds[1..] {
        match d.key {
            "labels" => {
                d.arity(1)?;
                if k.is_some() {
                    return Err(Error::parse(d.line, "`labels` given twice"));
                }
                k = Some(d.num(0, "label count")?);
            }
            "dual" => {
                let k = labels(k, d)?;
                d.arity(k)?;
                dual = Some((0..k).map(|i| d.index(i, k, "label")).collect::<Result<_>>()?);
            }
            "S" => {
                let k = labels(k, d)?;
                d.arity(3)?;
                let (i, j) = (d.index(0, k, "label")?, d.index(1, k, "label")?);
                let v = d.cyc(2)?;
                set(&mut s, (i, j), v.clone(), d.line, "S entry")?;
                if i != j {
                    // the transposed slot is filled unless given explicitly; an explicit
                    // transposed entry must agree
                    if let Some(t) = s.get(&(j, i)) {
                        if *t != v {
                            return Err(Error::parse(d.line, format!("S {i} {j} disagrees with S {j} {i}")));
                        }
                    } else {
                        s.insert((j, i), v);
                    }
                }
            }
            "theta" => {
                let k = labels(k, d)?;
                d.arity(2)?;
                set(&mut theta, d.index(0, k, "label")?, d.cyc(1)?, d.line, "theta")?;
            }
            "D" => {
                d.arity(1)?;
                let v = d.cyc(0)?;
                if global_d.as_ref().is_some_and(|old| *old != v) {
                    return Err(Error::parse(d.line, "D given twice with different values"));
                }
                global_d = Some(v);
            }
            _ => return Err(d.unknown()),
        }
    }
    let end = ds.last().map_or(0, |d| d.line);
    let k = k.ok_or_else(|| Error::parse(end, "missing `labels`"))?;
    let dual = dual.ok_or_else(|| Error::parse(end, "missing `dual`"))?;
    let mut rows = vec![Vec::with_capacity(k); k];
    for (i, row) in rows.iter_mut().enumerate() {
        for j in 0..k {
            row.push(
                s.remove(&(i, j))
                    .ok_or_else(|| Error::parse(end, format!("missing S {i} {j}")))?,
            );
        }
    }
    let theta = (0..k)
        .map(|i| {
            theta
                .remove(&i)
                .ok_or_else(|| Error::parse(end, format!("missing theta {i}")))
        })
        .collect::<Result<_>>()?;
    let global_d = global_d.ok_or_else(|| Error::parse(end, "missing `D`"))?;
    ModularData::new(ModularParts {
        conductor,
        dual,
        s: rows,
        theta,
        global_d,
    })
}

/// Upper-triangular S entries, every twist, and D, all over the conductor.
pub fn emit_modular_data(md: &ModularData) -> String {
    let k = md.rank();
    let mut out = String::new();
    writeln!(out, "conductor {}", md.conductor()).unwrap();
    writeln!(out, "labels {k}").unwrap();
    let dual: Vec<String> = md.duals().iter().map(|d| d.to_string()).collect();
    writeln!(out, "dual {}", dual.join(" ")).unwrap();
    for i in 0..k {
        for j in i..k {
            writeln!(out, "S {i} {j} {}", md.s(i, j).to_token()).unwrap();
        }
    }
    for i in 0..k {
        writeln!(out, "theta {i} {}", md.theta(i).to_token()).unwrap();
    }
    writeln!(out, "D {}", md.global_d().to_token()).unwrap();
    out
}

// ---------------------------------------------------------------- graphs

pub fn parse_graph(text: &str) -> Result<Graph> {
    let ds = directives(text, false);
    let h = header(&ds, "vertices")?;
    h.arity(1)?;
    let n: usize = h.num(0, "vertex count")?;
    let mut edges = Vec::new();
    let mut seen = HashMap::new();
    for d in &ds[1..] {
        if d.key != "edge" {
            return Err(d.unknown());
        }
        d.arity(2)?;
        let (u, v) = (d.index(0, n, "vertex")?, d.index(1, n, "vertex")?);
        if u == v {
            return Err(Error::parse(d.line, format!("loop at vertex {u}")));
        }
        if let Some(first) = seen.insert((u.min(v), u.max(v)), d.line) {
            return Err(Error::parse(d.line, format!("edge {{{u},{v}}} repeats line {first}")));
        }
        edges.push((u, v));
    }
    Graph::new(n, edges)
}

pub fn emit_graph(g: &Graph) -> String {
    let mut out = format!("vertices {}\n", g.vertex_count());
    for &(u, v) in g.edges() {
        writeln!(out, "edge {u} {v}").unwrap();
    }
    out
}

// ---------------------------------------------------------------- linking matrices

pub fn parse_linking(text: &str) -> Result<SurgeryPresentation> {
    let ds = directives(text, true);
    let h = header(&ds, "size")?;
    h.arity(1)?;
    let m: usize = h.num(0, "size")?;
    let mut entries: HashMap<(usize, usize), i64> = HashMap::new();
    let mut roles = vec![Role::Plain; m];
    let mut role_seen = vec![false; m];
    for d in &ds[1..] {
        match d.key {
            "entry" => {
                d.arity(3)?;
                let (i, j) = (d.index(0, m, "component")?, d.index(1, m, "component")?);
                let v: i64 = d.num(2, "linking number")?;
                set(&mut entries, (i.min(j), i.max(j)), v, d.line, "entry")?;
            }
            "role" => {
                d.arity(3)?;
                let i = d.index(0, m, "component")?;
                let id: usize = d.num(2, "id")?;
                let role = match d.args[1] {
                    "K" => Role::Vertex(id),
                    "a" => Role::GenusA(id),
                    "b" => Role::GenusB(id),
                    "c" => Role::Cycle(id),
                    other => return Err(Error::parse(d.line, format!("unknown role kind {other:?}"))),
                };
                if role_seen[i] && roles[i] != role {
                    return Err(Error::parse(d.line, format!("component {i} given two roles")));
                }
                role_seen[i] = true;
                roles[i] = role;
            }
            _ => return Err(d.unknown()),
        }
    }
    let mut matrix = vec![vec![0i64; m]; m];
    for (&(i, j), &v) in &entries {
        matrix[i][j] = v;
        matrix[j][i] = v;
    }
    SurgeryPresentation::new(matrix, roles)
}

pub fn emit_linking(sp: &SurgeryPresentation) -> String {
    let m = sp.size();
    let mut out = format!("size {m}\n");
    for (i, role) in sp.roles().iter().enumerate() {
        let (kind, id) = match *role {
            Role::Vertex(v) => ("K", v),
            Role::GenusA(v) => ("a", v),
            Role::GenusB(v) => ("b", v),
            Role::Cycle(e) => ("c", e),
            Role::Plain => continue,
        };
        writeln!(out, "# role {i} {kind} {id}").unwrap();
    }
    for i in 0..m {
        for j in i..m {
            let v = sp.matrix()[i][j];
            if v != 0 {
                writeln!(out, "entry {i} {j} {v}").unwrap();
            }
        }
    }
    out
}

// ---------------------------------------------------------------- groups

fn parse_orders(d: &Directive) -> Result<FinAbGroup> {
    let orders = (0..d.args.len()).map(|i| d.num(i, "order")).collect::<Result<Vec<u64>>>()?;
    FinAbGroup::new(orders).map_err(|e| Error::parse(d.line, e.to_string()))
}

fn emit_orders(g: &FinAbGroup) -> String {
    let parts: Vec<String> = g.orders().iter().map(|n| n.to_string()).collect();
    if parts.is_empty() {
        "orders\n".to_string()
    } else {
        format!("orders {}\n", parts.join(" "))
    }
}

pub fn parse_group(text: &str) -> Result<FinAbGroup> {
    let ds = directives(text, false);
    let g = parse_orders(header(&ds, "orders")?)?;
    if let Some(d) = ds.get(1) {
        return Err(d.unknown());
    }
    Ok(g)
}

pub fn emit_group(g: &FinAbGroup) -> String {
    emit_orders(g)
}

/// An element written `x1,...,xk`; the trivial group's element is `0`.
fn parse_element(g: &FinAbGroup, tok: &str, line: usize) -> Result<usize> {
    let parts: Vec<&str> = tok.split(',').collect();
    if g.rank() == 0 {
        if tok == "0" {
            return Ok(0);
        }
        return Err(Error::parse(line, format!("trivial group has only element 0, found {tok:?}")));
    }
    if parts.len() != g.rank() {
        return Err(Error::parse(
            line,
            format!("element {tok:?} needs {} coordinates", g.rank()),
        ));
    }
    let mut coords = Vec::with_capacity(parts.len());
    for (p, &n) in parts.iter().zip(g.orders()) {
        let v: u64 = p
            .parse()
            .map_err(|_| Error::parse(line, format!("bad coordinate {p:?}")))?;
        if v >= n {
            return Err(Error::parse(line, format!("coordinate {v} out of range 0..{n}")));
        }
        coords.push(v as i64);
    }
    Ok(g.index(&coords))
}

fn emit_element(g: &FinAbGroup, x: usize) -> String {
    if g.rank() == 0 {
        return "0".into();
    }
    let parts: Vec<String> = g.coords(x).iter().map(|c| c.to_string()).collect();
    parts.join(",")
}

fn modulus_line(ds: &[Directive]) -> Result<u64> {
    let d = ds
        .get(1)
        .filter(|d| d.key == "modulus")
        .ok_or_else(|| Error::parse(ds.get(1).map_or(ds[0].line, |d| d.line), "expected `modulus` after `orders`"))?;
    d.arity(1)?;
    let n: u64 = d.num(0, "modulus")?;
    if n == 0 {
        return Err(Error::parse(d.line, "modulus must be positive"));
    }
    Ok(n)
}

/// Elements without a `q` line get exponent 0.
pub fn parse_metric_group(text: &str) -> Result<MetricGroup> {
    let ds = directives(text, false);
    let g = parse_orders(header(&ds, "orders")?)?;
    let n = modulus_line(&ds)?;
    let mut table: HashMap<usize, i64> = HashMap::new();
    for d in &ds[2..] {
        if d.key != "q" {
            return Err(d.unknown());
        }
        d.arity(2)?;
        let x = parse_element(&g, d.args[0], d.line)?;
        let e: i64 = d.num(1, "exponent")?;
        set(&mut table, x, e.rem_euclid(n as i64), d.line, "q at element")?;
    }
    let qexp = (0..g.size()).map(|x| table.get(&x).copied().unwrap_or(0)).collect();
    MetricGroup::new(g, n, qexp)
}

/// One `q` line per element, in index order.
pub fn emit_metric_group(mg: &MetricGroup) -> String {
    let g = mg.group();
    let mut out = emit_orders(g);
    writeln!(out, "modulus {}", mg.modulus()).unwrap();
    for x in 0..g.size() {
        writeln!(out, "q {} {}", emit_element(g, x), mg.qexp(x)).unwrap();
    }
    out
}

/// Triples without an `omega` line get exponent 0.
pub fn parse_cocycle(text: &str) -> Result<Cocycle> {
    let ds = directives(text, false);
    let g = parse_orders(header(&ds, "orders")?)?;
    let n = modulus_line(&ds)?;
    let s = g.size();
    let mut table: HashMap<usize, i64> = HashMap::new();
    for d in &ds[2..] {
        if d.key != "omega" {
            return Err(d.unknown());
        }
        d.arity(2)?;
        let parts: Vec<&str> = d.args[0].split('|').collect();
        if parts.len() != 3 {
            return Err(Error::parse(d.line, "omega takes three elements x|y|z"));
        }
        let x = parse_element(&g, parts[0], d.line)?;
        let y = parse_element(&g, parts[1], d.line)?;
        let z = parse_element(&g, parts[2], d.line)?;
        let e: i64 = d.num(1, "exponent")?;
        set(&mut table, (x * s + y) * s + z, e.rem_euclid(n as i64), d.line, "omega at index")?;
    }
    let flat = (0..s * s * s).map(|i| table.get(&i).copied().unwrap_or(0)).collect();
    Cocycle::new(g, n, flat)
}

/// Nonzero entries only.
pub fn emit_cocycle(c: &Cocycle) -> String {
    let g = c.group();
    let mut out = emit_orders(g);
    writeln!(out, "modulus {}", c.modulus()).unwrap();
    for ([x, y, z], e) in c.nonzero_entries() {
        writeln!(
            out,
            "omega {}|{}|{} {e}",
            emit_element(g, x),
            emit_element(g, y),
            emit_element(g, z)
        )
        .unwrap();
    }
    out
}

// ---------------------------------------------------------------- weight matrices

/// Entries without an `A` line are 0.
pub fn parse_weights(text: &str) -> Result<WeightMatrix> {
    let ds = directives(text, false);
    let h = header(&ds, "weights")?;
    h.arity(1)?;
    let k: usize = h.num(0, "size")?;
    let mut entries: HashMap<(usize, usize), CycNum> = HashMap::new();
    for d in &ds[1..] {
        if d.key != "A" {
            return Err(d.unknown());
        }
        d.arity(3)?;
        let (i, j) = (d.index(0, k, "index")?, d.index(1, k, "index")?);
        set(&mut entries, (i, j), d.cyc(2)?, d.line, "A entry")?;
    }
    let rows = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| entries.remove(&(i, j)).unwrap_or_else(|| CycNum::zero(1)))
                .collect()
        })
        .collect();
    WeightMatrix::new(rows)
}

/// Nonzero entries only, over the matrix's common conductor.
pub fn emit_weights(a: &WeightMatrix) -> String {
    let k = a.size();
    let mut out = format!("weights {k}\n");
    for i in 0..k {
        for j in 0..k {
            let v = a.get(i, j);
            if !v.is_zero() {
                writeln!(out, "A {i} {j} {}", v.to_token()).unwrap();
            }
        }
    }
    out
}

// ---------------------------------------------------------------- dispatch

/// Any of the formats above, recognized by its first directive. A file
/// starting with `orders` is a cocycle if it has `omega` lines, a metric
/// group if it has a `modulus`, and a bare group otherwise.
#[derive(Debug, Clone)]
pub enum Document {
    Modular(ModularData),
    Graph(Graph),
    Linking(SurgeryPresentation),
    Metric(MetricGroup),
    Cocycle(Cocycle),
    Group(FinAbGroup),
    Weights(WeightMatrix),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Modular(_) => "modular data",
            Document::Graph(_) => "graph",
            Document::Linking(_) => "linking matrix",
            Document::Metric(_) => "metric group",
            Document::Cocycle(_) => "cocycle",
            Document::Group(_) => "group",
            Document::Weights(_) => "weight matrix",
        }
    }
}

pub fn parse_document(text: &str) -> Result<Document> {
    let ds = directives(text, false);
    let first = ds.first().ok_or_else(|| Error::parse(0, "empty file"))?;
    match first.key {
        "conductor" => parse_modular_data(text).map(Document::Modular),
        "vertices" => parse_graph(text).map(Document::Graph),
        "size" => parse_linking(text).map(Document::Linking),
        "weights" => parse_weights(text).map(Document::Weights),
        "orders" => {
            if ds.iter().any(|d| d.key == "omega") {
                parse_cocycle(text).map(Document::Cocycle)
            } else if ds.len() > 1 {
                parse_metric_group(text).map(Document::Metric)
            } else {
                parse_group(text).map(Document::Group)
            }
        }
        _ => Err(first.unknown()),
    }
}
