//! Distance matrices as CSV, PHYLIP and Nexus; trees as Newick and dot.
//!
//! Numbers are written in the shortest form that reads back to the same
//! `f64`, so every writer/reader pair round-trips exactly.

use std::fmt::Write as _;
use std::path::Path;

use quartet_core::{DistanceMatrix, Label, NodeId, Tree};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixFormat {
    Csv,
    Phylip,
    Nexus,
}

impl MatrixFormat {
    pub fn extension(self) -> &'static str {
        match self {
            MatrixFormat::Csv => "csv",
            MatrixFormat::Phylip => "phy",
            MatrixFormat::Nexus => "nex",
        }
    }

    /// Guesses the format of `text`: a `#NEXUS` header, a leading taxon
    /// count, or else CSV.
    pub fn detect(text: &str) -> MatrixFormat {
        let first = text.lines().map(str::trim).find(|l| !l.is_empty()).unwrap_or("");
        if first.len() >= 6 && first[..6].eq_ignore_ascii_case("#nexus") {
            MatrixFormat::Nexus
        } else if first.split_whitespace().count() == 1 && first.parse::<usize>().is_ok() {
            MatrixFormat::Phylip
        } else {
            MatrixFormat::Csv
        }
    }
}

/// A distance matrix with one name per object.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledMatrix {
    pub names: Vec<String>,
    pub matrix: DistanceMatrix,
}

impl LabeledMatrix {
    pub fn new(names: Vec<String>, matrix: DistanceMatrix) -> Result<LabeledMatrix> {
        if names.len() != matrix.size() {
            return Err(Error::Usage(format!("{} names for a {}x{} matrix", names.len(), matrix.size(), matrix.size())));
        }
        check_unique(&names)?;
        Ok(LabeledMatrix { names, matrix })
    }

    /// Names `0..n`.
    pub fn unnamed(matrix: DistanceMatrix) -> LabeledMatrix {
        LabeledMatrix { names: (0..matrix.size()).map(|i| i.to_string()).collect(), matrix }
    }
}

fn check_unique(names: &[String]) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for name in names {
        if !seen.insert(name) {
            return Err(Error::Core(quartet_core::Error::InvalidInput(format!("duplicate name {name:?}"))));
        }
    }
    Ok(())
}

fn number(text: &str, line: usize, column: usize) -> Result<f64> {
    text.parse::<f64>().map_err(|_| Error::parse(line, column, format!("expected a number, found {text:?}")))
}

fn build(names: Vec<String>, values: Vec<f64>) -> Result<LabeledMatrix> {
    let n = names.len();
    let matrix = DistanceMatrix::new(n, values)?;
    LabeledMatrix::new(names, matrix)
}

pub fn parse_matrix(text: &str, format: MatrixFormat) -> Result<LabeledMatrix> {
    match format {
        MatrixFormat::Csv => parse_csv(text),
        MatrixFormat::Phylip => parse_phylip(text),
        MatrixFormat::Nexus => parse_nexus(text),
    }
}

pub fn write_matrix(m: &LabeledMatrix, format: MatrixFormat) -> String {
    match format {
        MatrixFormat::Csv => write_csv(m),
        MatrixFormat::Phylip => write_phylip(m),
        MatrixFormat::Nexus => write_nexus(m),
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Reads a matrix file, detecting the format unless one is given.
pub fn read_matrix_file(path: &Path, format: Option<MatrixFormat>) -> Result<LabeledMatrix> {
    let text = read_text(path)?;
    let format = format.unwrap_or_else(|| MatrixFormat::detect(&text));
    parse_matrix(&text, format).map_err(|e| e.in_file(path))
}

// ---- CSV ----

struct Cell {
    text: String,
    column: usize,
}

/// Records of `text` with their line numbers; cell columns count fields.
fn csv_rows(text: &str) -> Result<Vec<(usize, Vec<Cell>)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(1, |p| p.line() as usize);
            Error::parse(line, 1, e.to_string())
        })?;
        let line = record.position().map_or(1, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let cells = record.iter().enumerate().map(|(i, f)| Cell { text: f.to_string(), column: i + 1 }).collect();
        rows.push((line, cells));
    }
    Ok(rows)
}

/// Square CSV. An optional header row holds the names (with or without a
/// leading corner cell); rows may start with a name. Blank lines and lines
/// starting with `#` are skipped. Error columns are 1-based field numbers.
pub fn parse_csv(text: &str) -> Result<LabeledMatrix> {
    let rows = csv_rows(text)?;
    if rows.is_empty() {
        return Err(Error::parse(1, 1, "empty matrix"));
    }
    // a header holds names only, or a corner cell followed by one name per
    // remaining row (names may then look like numbers)
    let header = {
        let cells = &rows[0].1;
        let is_num = |c: &Cell| c.text.parse::<f64>().is_ok();
        cells.len() > 1
            && (cells[1..].iter().all(|c| !is_num(c)) && cells.iter().any(|c| !c.text.is_empty() && !is_num(c))
                || !is_num(&cells[0]) && cells.len() == rows.len())
    };
    let (header_row, body) = if header { (Some(&rows[0]), &rows[1..]) } else { (None, &rows[..]) };
    let n = body.len();
    if n == 0 {
        return Err(Error::parse(rows[0].0, 1, "header without matrix rows"));
    }
    let mut values = Vec::with_capacity(n * n);
    let mut row_names: Vec<String> = Vec::new();
    for (line, cells) in body {
        let named = cells.len() == n + 1 || cells[0].text.parse::<f64>().is_err();
        let data = if named { &cells[1..] } else { &cells[..] };
        if named {
            row_names.push(cells[0].text.clone());
        }
        if data.len() != n {
            let column = cells.last().map_or(1, |c| c.column);
            return Err(Error::parse(*line, column, format!("expected {n} values, found {}", data.len())));
        }
        for c in data {
            values.push(number(&c.text, *line, c.column)?);
        }
    }
    if !row_names.is_empty() && row_names.len() != n {
        return Err(Error::parse(body[0].0, 1, "some rows are named and some are not"));
    }
    let header_names: Option<Vec<String>> = header_row.map(|(line, cells)| {
        let names: Vec<String> = cells.iter().map(|c| c.text.clone()).collect();
        if names.len() == n + 1 {
            Ok(names[1..].to_vec())
        } else if names.len() == n {
            Ok(names)
        } else {
            Err(Error::parse(*line, 1, format!("header has {} names for {n} rows", names.len())))
        }
    }).transpose()?;
    let names = match (header_names, row_names.is_empty()) {
        (Some(h), false) if h != row_names => {
            return Err(Error::parse(header_row.map_or(1, |r| r.0), 1, "header names differ from row names"))
        }
        (Some(h), _) => h,
        (None, false) => row_names,
        (None, true) => (0..n).map(|i| i.to_string()).collect(),
    };
    build(names, values)
}

pub fn write_csv(m: &LabeledMatrix) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let record = |w: &mut csv::Writer<Vec<u8>>, fields: Vec<String>| w.write_record(fields).expect("in-memory write");
    record(&mut w, std::iter::once("name".to_string()).chain(m.names.iter().cloned()).collect());
    for (i, name) in m.names.iter().enumerate() {
        record(&mut w, std::iter::once(name.clone()).chain(m.matrix.row(i).iter().map(f64::to_string)).collect());
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

// ---- token streams for PHYLIP and Nexus ----

#[derive(Debug, Clone)]
struct Token {
    text: String,
    line: usize,
    column: usize,
    quoted: bool,
}

/// Splits on whitespace. With `nexus`, `;`, `=` and `,` are tokens of their
/// own, `[...]` comments are dropped and `'...'` quotes a word (`''` is a
/// literal quote).
fn tokenize(text: &str, nexus: bool) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 0usize);
    let mut cur: Option<Token> = None;
    let flush = |cur: &mut Option<Token>, out: &mut Vec<Token>| {
        if let Some(t) = cur.take() {
            out.push(t);
        }
    };
    while let Some(c) = chars.next() {
        column += 1;
        if c == '\n' {
            flush(&mut cur, &mut out);
            line += 1;
            column = 0;
            continue;
        }
        if c.is_whitespace() {
            flush(&mut cur, &mut out);
            continue;
        }
        if nexus && c == '[' {
            flush(&mut cur, &mut out);
            let (l0, c0) = (line, column);
            loop {
                match chars.next() {
                    Some(']') => {
                        column += 1;
                        break;
                    }
                    Some('\n') => {
                        line += 1;
                        column = 0;
                    }
                    Some(_) => column += 1,
                    None => return Err(Error::parse(l0, c0, "unterminated comment")),
                }
            }
            continue;
        }
        if nexus && c == '\'' {
            flush(&mut cur, &mut out);
            let (l0, c0) = (line, column);
            let mut word = String::new();
            loop {
                match chars.next() {
                    Some('\'') if chars.peek() == Some(&'\'') => {
                        chars.next();
                        column += 2;
                        word.push('\'');
                    }
                    Some('\'') => {
                        column += 1;
                        break;
                    }
                    Some('\n') => return Err(Error::parse(l0, c0, "unterminated quoted word")),
                    Some(ch) => {
                        column += 1;
                        word.push(ch);
                    }
                    None => return Err(Error::parse(l0, c0, "unterminated quoted word")),
                }
            }
            out.push(Token { text: word, line: l0, column: c0, quoted: true });
            continue;
        }
        if nexus && matches!(c, ';' | '=' | ',') {
            flush(&mut cur, &mut out);
            out.push(Token { text: c.to_string(), line, column, quoted: false });
            continue;
        }
        match &mut cur {
            Some(t) => t.text.push(c),
            None => cur = Some(Token { text: c.to_string(), line, column, quoted: false }),
        }
    }
    flush(&mut cur, &mut out);
    Ok(out)
}

struct Tokens {
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

impl Tokens {
    fn new(text: &str, nexus: bool) -> Result<Tokens> {
        let lines = text.lines().count().max(1);
        let last = text.lines().last().map_or(0, |l| l.chars().count());
        Ok(Tokens { toks: tokenize(text, nexus)?, pos: 0, end: (lines, last + 1) })
    }

    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn next(&mut self, what: &str) -> Result<Token> {
        match self.toks.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => Err(Error::parse(self.end.0, self.end.1, format!("unexpected end of input, expected {what}"))),
        }
    }

    fn number(&mut self) -> Result<f64> {
        let t = self.next("a number")?;
        number(&t.text, t.line, t.column)
    }

    fn expect(&mut self, word: &str) -> Result<Token> {
        let t = self.next(&format!("{word:?}"))?;
        if t.quoted || !t.text.eq_ignore_ascii_case(word) {
            return Err(Error::parse(t.line, t.column, format!("expected {word:?}, found {:?}", t.text)));
        }
        Ok(t)
    }
}

// ---- PHYLIP ----

/// Square PHYLIP: the taxon count, then one row per taxon holding its name
/// and `n` values. Values may wrap across lines.
pub fn parse_phylip(text: &str) -> Result<LabeledMatrix> {
    let mut toks = Tokens::new(text, false)?;
    let head = toks.next("the number of taxa")?;
    let n: usize = head
        .text
        .parse()
        .map_err(|_| Error::parse(head.line, head.column, format!("expected the number of taxa, found {:?}", head.text)))?;
    let mut names = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n * n);
    for _ in 0..n {
        names.push(toks.next("a taxon name")?.text);
        for _ in 0..n {
            values.push(toks.number()?);
        }
    }
    if let Some(t) = toks.peek() {
        return Err(Error::parse(t.line, t.column, format!("unexpected trailing {:?}", t.text)));
    }
    build(names, values)
}

pub fn write_phylip(m: &LabeledMatrix) -> String {
    let n = m.names.len();
    let mut out = format!("{n}\n");
    for i in 0..n {
        let _ = write!(out, "{:<10}", m.names[i]);
        for j in 0..n {
            let _ = write!(out, " {}", m.matrix.get(i, j));
        }
        out.push('\n');
    }
    out
}

// ---- Nexus ----

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Triangle {
    Lower,
    Upper,
    Both,
}

fn skip_command(toks: &mut Tokens) -> Result<()> {
    loop {
        if toks.next("\";\"")?.text == ";" {
            return Ok(());
        }
    }
}

fn parse_taxlabels(toks: &mut Tokens) -> Result<Vec<String>> {
    let mut names = Vec::new();
    loop {
        let t = toks.next("a taxon label or \";\"")?;
        if t.text == ";" && !t.quoted {
            return Ok(names);
        }
        names.push(t.text);
    }
}

/// The `DISTANCES` block of a Nexus file, with `TAXLABELS` from a `TAXA`
/// block when the matrix carries no labels. Supports `triangle` lower,
/// upper or both, with or without the diagonal, labeled or not.
pub fn parse_nexus(text: &str) -> Result<LabeledMatrix> {
    let mut toks = Tokens::new(text, true)?;
    let head = toks.next("#NEXUS")?;
    if !head.text.eq_ignore_ascii_case("#nexus") {
        return Err(Error::parse(head.line, head.column, "missing #NEXUS header"));
    }
    let mut taxlabels: Option<Vec<String>> = None;
    let mut ntax_taxa: Option<usize> = None;
    loop {
        if toks.peek().is_none() {
            return Err(Error::parse(toks.end.0, toks.end.1, "no DISTANCES block"));
        }
        let t = toks.next("BEGIN")?;
        if !t.text.eq_ignore_ascii_case("begin") {
            return Err(Error::parse(t.line, t.column, format!("expected BEGIN, found {:?}", t.text)));
        }
        let block = toks.next("a block name")?;
        toks.expect(";")?;
        let name = block.text.to_ascii_lowercase();
        if name == "distances" {
            return parse_distances_block(&mut toks, taxlabels, ntax_taxa);
        }
        // other blocks: keep TAXLABELS and DIMENSIONS from a taxa block
        loop {
            let cmd = toks.next("END")?;
            let word = cmd.text.to_ascii_lowercase();
            if word == "end" || word == "endblock" {
                toks.expect(";")?;
                break;
            }
            if name == "taxa" && word == "taxlabels" {
                taxlabels = Some(parse_taxlabels(&mut toks)?);
            } else if name == "taxa" && word == "dimensions" {
                ntax_taxa = Some(parse_dimensions(&mut toks)?);
            } else if word != ";" {
                skip_command(&mut toks)?;
            }
        }
    }
}

fn parse_dimensions(toks: &mut Tokens) -> Result<usize> {
    let mut ntax = None;
    loop {
        let t = toks.next("\";\"")?;
        if t.text == ";" {
            break;
        }
        if t.text.eq_ignore_ascii_case("ntax") {
            toks.expect("=")?;
            let v = toks.next("a taxon count")?;
            ntax = Some(
                v.text
                    .parse::<usize>()
                    .map_err(|_| Error::parse(v.line, v.column, format!("bad ntax {:?}", v.text)))?,
            );
        }
    }
    let here = toks.toks[toks.pos - 1].clone();
    ntax.ok_or_else(|| Error::parse(here.line, here.column, "DIMENSIONS without NTAX"))
}

fn parse_distances_block(toks: &mut Tokens, taxlabels: Option<Vec<String>>, ntax_taxa: Option<usize>) -> Result<LabeledMatrix> {
    let mut ntax = ntax_taxa.or(taxlabels.as_ref().map(Vec::len));
    let mut triangle = Triangle::Lower;
    let mut diagonal = true;
    let mut labels = true;
    let mut taxlabels = taxlabels;
    loop {
        let cmd = toks.next("MATRIX")?;
        match cmd.text.to_ascii_lowercase().as_str() {
            "dimensions" => ntax = Some(parse_dimensions(toks)?),
            "taxlabels" => taxlabels = Some(parse_taxlabels(toks)?),
            "format" => loop {
                let t = toks.next("\";\"")?;
                match t.text.to_ascii_lowercase().as_str() {
                    ";" => break,
                    "triangle" => {
                        toks.expect("=")?;
                        let v = toks.next("lower, upper or both")?;
                        triangle = match v.text.to_ascii_lowercase().as_str() {
                            "lower" => Triangle::Lower,
                            "upper" => Triangle::Upper,
                            "both" => Triangle::Both,
                            other => return Err(Error::parse(v.line, v.column, format!("unknown triangle {other:?}"))),
                        };
                    }
                    "diagonal" => diagonal = true,
                    "nodiagonal" => diagonal = false,
                    "labels" | "labels=left" => labels = true,
                    "nolabels" => labels = false,
                    "interleave" => return Err(Error::parse(t.line, t.column, "interleaved matrices are not supported")),
                    "missing" | "labels_position" => {
                        toks.expect("=")?;
                        toks.next("a value")?;
                    }
                    _ => {}
                }
            },
            "matrix" => {
                let n = ntax.ok_or_else(|| Error::parse(cmd.line, cmd.column, "MATRIX before DIMENSIONS"))?;
                if !labels && taxlabels.is_none() {
                    return Err(Error::parse(cmd.line, cmd.column, "unlabeled matrix without TAXLABELS"));
                }
                let mut names = Vec::with_capacity(n);
                let mut values = vec![0.0; n * n];
                for i in 0..n {
                    if labels {
                        names.push(toks.next("a taxon label")?.text);
                    }
                    let cols: Vec<usize> = match triangle {
                        Triangle::Both => (0..n).collect(),
                        Triangle::Lower => (0..=i).collect(),
                        Triangle::Upper => (i..n).collect(),
                    };
                    for j in cols {
                        if j == i && !diagonal {
                            continue;
                        }
                        let t = toks.next("a number")?;
                        let v = number(&t.text, t.line, t.column)?;
                        values[i * n + j] = v;
                        if triangle != Triangle::Both {
                            values[j * n + i] = v;
                        }
                    }
                }
                let end = toks.next("\";\"")?;
                if end.text != ";" {
                    return Err(Error::parse(end.line, end.column, format!("expected \";\" after the matrix, found {:?}", end.text)));
                }
                if !labels {
                    names = taxlabels.clone().unwrap_or_default();
                } else if let Some(t) = &taxlabels {
                    if *t != names {
                        return Err(Error::parse(cmd.line, cmd.column, "matrix labels differ from TAXLABELS"));
                    }
                }
                if names.len() != n {
                    return Err(Error::parse(cmd.line, cmd.column, format!("{} labels for ntax = {n}", names.len())));
                }
                return build(names, values);
            }
            "end" | "endblock" => return Err(Error::parse(cmd.line, cmd.column, "DISTANCES block without MATRIX")),
            _ => skip_command(toks)?,
        }
    }
}

fn nexus_word(name: &str) -> String {
    let plain = !name.is_empty()
        && name.chars().all(|c| !c.is_whitespace() && !"()[]{}/\\,;:=*'\"`+-<>".contains(c));
    if plain {
        name.to_string()
    } else {
        format!("'{}'", name.replace('\'', "''"))
    }
}

pub fn write_nexus(m: &LabeledMatrix) -> String {
    let n = m.names.len();
    let mut out = String::from("#NEXUS\n\nBEGIN taxa;\n");
    let _ = writeln!(out, "  DIMENSIONS ntax={n};");
    out.push_str("  TAXLABELS");
    for name in &m.names {
        let _ = write!(out, " {}", nexus_word(name));
    }
    out.push_str(";\nEND;\n\nBEGIN distances;\n");
    let _ = writeln!(out, "  DIMENSIONS ntax={n};");
    out.push_str("  FORMAT triangle=both diagonal labels;\n  MATRIX\n");
    for i in 0..n {
        let _ = write!(out, "    {}", nexus_word(&m.names[i]));
        for j in 0..n {
            let _ = write!(out, " {}", m.matrix.get(i, j));
        }
        out.push('\n');
    }
    out.push_str("  ;\nEND;\n");
    out
}

// ---- Newick ----

fn newick_word(name: &str) -> String {
    let plain = !name.is_empty() && name.chars().all(|c| !c.is_whitespace() && !"()[]':;,".contains(c));
    if plain {
        name.to_string()
    } else {
        format!("'{}'", name.replace('\'', "''"))
    }
}

/// Newick text of an unrooted tree, written from the internal node next to
/// leaf 0 with subtrees ordered by their smallest leaf label. The rooting is
/// only a presentation choice.
pub fn to_newick(tree: &Tree, names: &[String]) -> String {
    fn subtree(tree: &Tree, names: &[String], node: NodeId, from: NodeId, out: &mut String) -> Label {
        if tree.is_leaf(node) {
            out.push_str(&newick_word(&names[node]));
            return node;
        }
        let mut kids: Vec<(Label, String)> = tree
            .neighbors(node)
            .iter()
            .filter(|&&y| y != from)
            .map(|&y| {
                let mut s = String::new();
                let min = subtree(tree, names, y, node, &mut s);
                (min, s)
            })
            .collect();
        kids.sort();
        out.push('(');
        out.push_str(&kids.iter().map(|k| k.1.as_str()).collect::<Vec<_>>().join(","));
        out.push(')');
        kids[0].0
    }
    let root = tree.parent(0);
    let mut parts: Vec<(Label, String)> = tree
        .neighbors(root)
        .iter()
        .map(|&y| {
            let mut s = String::new();
            let min = subtree(tree, names, y, root, &mut s);
            (min, s)
        })
        .collect();
    parts.sort();
    format!("({});", parts.iter().map(|k| k.1.as_str()).collect::<Vec<_>>().join(","))
}

/// A parsed Newick tree before its leaves are matched to matrix names.
#[derive(Debug, Clone, PartialEq)]
pub struct NewickTree {
    /// Leaf names in order of appearance.
    pub leaves: Vec<String>,
    /// Children of every node; node 0 is the root.
    children: Vec<Vec<usize>>,
    /// Leaf name index of a node, if it is a leaf.
    leaf_of: Vec<Option<usize>>,
}

struct NewickParser<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
    tree: NewickTree,
}

impl NewickParser<'_> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 0;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::parse(self.line, self.column.max(1), message)
    }

    fn skip_blank(&mut self) -> Result<()> {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '[' {
                let (l, col) = (self.line, self.column + 1);
                loop {
                    match self.bump() {
                        Some(']') => break,
                        Some(_) => {}
                        None => return Err(Error::parse(l, col, "unterminated comment")),
                    }
                }
            } else {
                break;
            }
        }
        Ok(())
    }

    fn label(&mut self) -> Result<Option<String>> {
        self.skip_blank()?;
        if self.chars.peek() == Some(&'\'') {
            self.bump();
            let mut s = String::new();
            loop {
                match self.bump() {
                    Some('\'') if self.chars.peek() == Some(&'\'') => {
                        self.bump();
                        s.push('\'');
                    }
                    Some('\'') => return Ok(Some(s)),
                    Some(c) => s.push(c),
                    None => return Err(self.err("unterminated quoted label")),
                }
            }
        }
        let mut s = String::new();
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() || "()[]':;,".contains(c) {
                break;
            }
            s.push(c);
            self.bump();
        }
        Ok(if s.is_empty() { None } else { Some(s) })
    }

    fn branch_length(&mut self) -> Result<()> {
        self.skip_blank()?;
        if self.chars.peek() == Some(&':') {
            self.bump();
            self.skip_blank()?;
            let (l, col) = (self.line, self.column + 1);
            let mut s = String::new();
            while let Some(&c) = self.chars.peek() {
                if c.is_whitespace() || "()[],;".contains(c) {
                    break;
                }
                s.push(c);
                self.bump();
            }
            number(&s, l, col)?;
        }
        Ok(())
    }

    fn node(&mut self) -> Result<usize> {
        self.skip_blank()?;
        let id = self.tree.children.len();
        self.tree.children.push(Vec::new());
        self.tree.leaf_of.push(None);
        if self.chars.peek() == Some(&'(') {
            self.bump();
            loop {
                let child = self.node()?;
                self.tree.children[id].push(child);
                self.skip_blank()?;
                match self.bump() {
                    Some(',') => continue,
                    Some(')') => break,
                    Some(c) => return Err(self.err(format!("expected ',' or ')', found {c:?}"))),
                    None => return Err(self.err("unexpected end of input inside parentheses")),
                }
            }
            self.label()?;
        } else {
            let name = self.label()?.ok_or_else(|| self.err("expected a leaf name"))?;
            self.tree.leaf_of[id] = Some(self.tree.leaves.len());
            self.tree.leaves.push(name);
        }
        self.branch_length()?;
        Ok(id)
    }
}

pub fn parse_newick(text: &str) -> Result<NewickTree> {
    let mut p = NewickParser {
        chars: text.chars().peekable(),
        line: 1,
        column: 0,
        tree: NewickTree { leaves: Vec::new(), children: Vec::new(), leaf_of: Vec::new() },
    };
    p.node()?;
    p.skip_blank()?;
    match p.bump() {
        Some(';') => {}
        Some(c) => return Err(p.err(format!("expected ';', found {c:?}"))),
        None => return Err(p.err("missing ';' at the end of the tree")),
    }
    p.skip_blank()?;
    if p.chars.peek().is_some() {
        p.bump();
        return Err(p.err("unexpected text after ';'"));
    }
    Ok(p.tree)
}

impl NewickTree {
    /// Maps leaves onto `names` (label `i` is `names[i]`) and builds the
    /// unrooted ternary tree. A bifurcating root is suppressed.
    pub fn to_tree(&self, names: &[String]) -> Result<Tree> {
        let n = names.len();
        let index: std::collections::HashMap<&str, Label> =
            names.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let mut seen = vec![false; n];
        for leaf in &self.leaves {
            let &label = index.get(leaf.as_str()).ok_or_else(|| {
                Error::Core(quartet_core::Error::InvalidInput(format!("tree leaf {leaf:?} is not among the matrix names")))
            })?;
            if std::mem::replace(&mut seen[label], true) {
                return Err(Error::Core(quartet_core::Error::InvalidInput(format!("tree leaf {leaf:?} appears twice"))));
            }
        }
        if let Some(i) = seen.iter().position(|&s| !s) {
            return Err(Error::Core(quartet_core::Error::InvalidInput(format!(
                "matrix name {:?} is missing from the tree",
                names[i]
            ))));
        }
        let bad = |msg: String| Error::Core(quartet_core::Error::MalformedTree(msg));
        // ids: leaves keep their label, internal nodes count up from n
        let mut id = vec![usize::MAX; self.children.len()];
        let mut next = n;
        for (v, leaf) in self.leaf_of.iter().enumerate() {
            match leaf {
                Some(l) => id[v] = index[self.leaves[*l].as_str()],
                None => {
                    id[v] = next;
                    next += 1;
                }
            }
        }
        let mut edges = Vec::new();
        let root_kids = &self.children[0];
        for (v, kids) in self.children.iter().enumerate() {
            if self.leaf_of[v].is_some() {
                continue;
            }
            if v != 0 && kids.len() != 2 {
                return Err(bad(format!("internal node with {} children; only binary splits are supported", kids.len())));
            }
            if v == 0 && !(kids.len() == 2 || kids.len() == 3) {
                return Err(bad(format!("root with {} children", kids.len())));
            }
            if v == 0 && kids.len() == 2 {
                continue;
            }
            for &k in kids {
                edges.push((id[v], id[k]));
            }
        }
        if root_kids.len() == 2 {
            // drop the degree-2 root and renumber the last internal id into its slot
            edges.push((id[root_kids[0]], id[root_kids[1]]));
            let (gone, last) = (id[0], next - 1);
            for e in &mut edges {
                for x in [&mut e.0, &mut e.1] {
                    if *x == last {
                        *x = gone;
                    }
                }
            }
        }
        Ok(Tree::from_edges(n, &edges)?)
    }
}

/// Parses Newick text against the given names.
pub fn tree_from_newick(text: &str, names: &[String]) -> Result<Tree> {
    parse_newick(text)?.to_tree(names)
}

pub fn read_tree_file(path: &Path, names: &[String]) -> Result<Tree> {
    let text = read_text(path)?;
    tree_from_newick(&text, names).map_err(|e| e.in_file(path))
}

/// Graphviz text: leaves by name, internal nodes `k1..k(n-2)`.
pub fn to_dot(tree: &Tree, names: &[String]) -> String {
    let n = tree.leaf_count();
    let node = |x: NodeId| {
        if x < n {
            format!("\"{}\"", names[x].replace('\\', "\\\\").replace('"', "\\\""))
        } else {
            format!("\"k{}\"", x - n + 1)
        }
    };
    let mut out = String::from("graph tree {\n");
    for x in n..tree.node_count() {
        let _ = writeln!(out, "  {} [shape=point];", node(x));
    }
    for (a, b) in tree.edges() {
        let _ = writeln!(out, "  {} -- {};", node(a), node(b));
    }
    out.push_str("}\n");
    out
}
