//! Plain-text writers: CSV (comma, dot decimal, header row), tab-separated
//! edge lists and GraphML.
//!
//! Floats use Rust's shortest round-trip formatting, so reading a value back
//! yields the same `f64` and equal inputs give byte-identical files.

use std::io::{self, Write};

use crate::graph::Graph;
use crate::scale::{Temperament, C1_HZ};
use crate::spectrum::PartialSpectrum;
use crate::syntony::SyntonyMatrix;

/// Escapes a CSV field when it holds a comma, quote or newline.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// `temperament,index,ratio,frequency`, index 1-based, frequency at C1.
pub fn write_temperaments_csv<W: Write + ?Sized>(w: &mut W, temperaments: &[Temperament]) -> io::Result<()> {
    writeln!(w, "temperament,index,ratio,frequency")?;
    for t in temperaments {
        for (i, r) in t.ratios.iter().enumerate() {
            writeln!(w, "{},{},{},{}", t.name, i + 1, r, C1_HZ * r)?;
        }
    }
    Ok(())
}

/// `note,n,frequency,amplitude` for each labelled spectrum.
pub fn write_spectra_csv<W: Write + ?Sized>(w: &mut W, spectra: &[(String, PartialSpectrum)]) -> io::Result<()> {
    writeln!(w, "note,n,frequency,amplitude")?;
    for (label, s) in spectra {
        for (k, p) in s.partials.iter().enumerate() {
            writeln!(w, "{},{},{},{}", csv_field(label), k + 1, p.frequency, p.amplitude)?;
        }
    }
    Ok(())
}

/// Square weight matrix with a label column and a label header.
pub fn write_matrix_csv<W: Write + ?Sized>(w: &mut W, m: &SyntonyMatrix) -> io::Result<()> {
    write!(w, "note")?;
    for l in &m.labels {
        write!(w, ",{}", csv_field(l))?;
    }
    writeln!(w)?;
    for i in 0..m.len() {
        write!(w, "{}", csv_field(&m.labels[i]))?;
        for x in m.row(i) {
            write!(w, ",{x}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// One `i<TAB>j<TAB>weight` line per edge.
pub fn write_edge_list<W: Write + ?Sized>(w: &mut W, g: &Graph) -> io::Result<()> {
    for e in g.edges() {
        writeln!(w, "{}\t{}\t{}", e.source, e.target, e.weight)?;
    }
    Ok(())
}

/// Parses the output of [`write_edge_list`] back into `(i, j, weight)`.
pub fn parse_edge_list(text: &str) -> Result<Vec<(usize, usize, f64)>, String> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(k, line)| {
            let mut it = line.split('\t');
            let mut next = |what: &str| it.next().ok_or_else(|| format!("line {}: missing {what}", k + 1));
            let i = next("source")?.parse().map_err(|e| format!("line {}: {e}", k + 1))?;
            let j = next("target")?.parse().map_err(|e| format!("line {}: {e}", k + 1))?;
            let w = next("weight")?.parse().map_err(|e| format!("line {}: {e}", k + 1))?;
            Ok((i, j, w))
        })
        .collect()
}

pub fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// GraphML with the node label as a string attribute and edge weights as a
/// double attribute. `graph_id` becomes the `<graph id>`.
pub fn write_graphml<W: Write + ?Sized>(w: &mut W, g: &Graph, graph_id: &str) -> io::Result<()> {
    writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(w, r#"<graphml xmlns="http://graphml.graphdrawing.org/xmlns">"#)?;
    writeln!(w, r#"  <key id="label" for="node" attr.name="label" attr.type="string"/>"#)?;
    writeln!(w, r#"  <key id="weight" for="edge" attr.name="weight" attr.type="double"/>"#)?;
    writeln!(w, r#"  <graph id="{}" edgedefault="undirected">"#, xml_escape(graph_id))?;
    for (i, label) in g.labels().iter().enumerate() {
        writeln!(w, r#"    <node id="n{i}"><data key="label">{}</data></node>"#, xml_escape(label))?;
    }
    for e in g.edges() {
        writeln!(
            w,
            r#"    <edge source="n{}" target="n{}"><data key="weight">{}</data></edge>"#,
            e.source, e.target, e.weight
        )?;
    }
    writeln!(w, "  </graph>")?;
    writeln!(w, "</graphml>")
}
