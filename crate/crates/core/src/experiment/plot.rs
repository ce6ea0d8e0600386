//! SVG renderings of result CSVs. Nothing here computes physics; every plot
//! reads back a file written by the pipelines.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use plotters::prelude::*;

use crate::error::{Error, Result};

const SIZE: (u32, u32) = (800, 560);
const PALETTE: [RGBColor; 6] = [
    RGBColor(31, 119, 180),
    RGBColor(214, 39, 40),
    RGBColor(44, 160, 44),
    RGBColor(148, 103, 189),
    RGBColor(255, 127, 14),
    RGBColor(23, 190, 207),
];

/// Numeric CSV: column names and rows.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Table> {
        let io = |e: csv::Error| Error::Io(format!("{}: {e}", path.display()));
        let mut r = csv::Reader::from_path(path).map_err(io)?;
        let header = r.headers().map_err(io)?.iter().map(String::from).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(io)?;
            let row = rec
                .iter()
                .map(|s| s.parse::<f64>().map_err(|e| Error::Io(format!("{}: '{s}': {e}", path.display()))))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(Table { header, rows })
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let i = self
            .header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Io(format!("missing column '{name}'")))?;
        Ok(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Rows split by the value of column `key`, in first-seen order.
    fn groups(&self, key: &str) -> Result<Vec<(f64, Table)>> {
        let k = self.column(key)?;
        let mut order: Vec<f64> = Vec::new();
        let mut by: BTreeMap<usize, Vec<Vec<f64>>> = BTreeMap::new();
        for (v, row) in k.iter().zip(&self.rows) {
            let idx = order.iter().position(|o| o == v).unwrap_or_else(|| {
                order.push(*v);
                order.len() - 1
            });
            by.entry(idx).or_default().push(row.clone());
        }
        Ok(by
            .into_iter()
            .map(|(i, rows)| {
                (
                    order[i],
                    Table {
                        header: self.header.clone(),
                        rows,
                    },
                )
            })
            .collect())
    }
}

fn plot_err<E: std::fmt::Display>(e: E) -> Error {
    Error::Io(format!("plot: {e}"))
}

fn finite_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
    dashed: bool,
}

/// Line plot with linear axes.
fn line_plot(path: &Path, title: &str, x_label: &str, y_label: &str, series: &[Series]) -> Result<()> {
    let (x0, x1) = finite_range(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (y0, y1) = finite_range(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let root = SVGBackend::new(path, SIZE).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 22))
        .margin(12)
        .x_label_area_size(44)
        .y_label_area_size(64)
        .build_cartesian_2d(x0..x1, y0..y1)
        .map_err(plot_err)?;
    chart.configure_mesh().x_desc(x_label).y_desc(y_label).draw().map_err(plot_err)?;
    draw_series(&mut chart, series)?;
    root.present().map_err(plot_err)
}

/// Line plot with logarithmic axes; non-positive points are dropped.
fn log_plot(path: &Path, title: &str, x_label: &str, y_label: &str, series: &[Series], log_y: bool) -> Result<()> {
    let pos = |v: f64| v.is_finite() && v > 0.0;
    let xs = || series.iter().flat_map(|s| s.points.iter().map(|p| p.0)).filter(|v| pos(*v));
    let (x0, x1) = (xs().fold(f64::INFINITY, f64::min), xs().fold(0.0, f64::max));
    if !(x0.is_finite() && x1 > x0) {
        return Err(Error::Io(format!("plot: no positive x range for {}", path.display())));
    }
    let root = SVGBackend::new(path, SIZE).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let mut builder = ChartBuilder::on(&root);
    builder
        .caption(title, ("sans-serif", 22))
        .margin(12)
        .x_label_area_size(44)
        .y_label_area_size(72);
    let kept: Vec<Series> = series
        .iter()
        .map(|s| Series {
            label: s.label.clone(),
            points: s.points.iter().copied().filter(|p| pos(p.0) && (!log_y || pos(p.1))).collect(),
            dashed: s.dashed,
        })
        .collect();
    if log_y {
        let ys = || kept.iter().flat_map(|s| s.points.iter().map(|p| p.1));
        let (y0, y1) = (ys().fold(f64::INFINITY, f64::min), ys().fold(0.0, f64::max));
        if !(y0.is_finite() && y1 > y0) {
            return Err(Error::Io(format!("plot: no positive y range for {}", path.display())));
        }
        let mut chart = builder
            .build_cartesian_2d((x0..x1).log_scale(), (y0 * 0.8..y1 * 1.25).log_scale())
            .map_err(plot_err)?;
        chart.configure_mesh().x_desc(x_label).y_desc(y_label).draw().map_err(plot_err)?;
        draw_series(&mut chart, &kept)?;
    } else {
        let (y0, y1) = finite_range(kept.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
        let mut chart = builder.build_cartesian_2d((x0..x1).log_scale(), y0..y1).map_err(plot_err)?;
        chart.configure_mesh().x_desc(x_label).y_desc(y_label).draw().map_err(plot_err)?;
        draw_series(&mut chart, &kept)?;
    }
    root.present().map_err(plot_err)
}

fn draw_series<'a, DB, X, Y>(chart: &mut ChartContext<'a, DB, Cartesian2d<X, Y>>, series: &[Series]) -> Result<()>
where
    DB: DrawingBackend + 'a,
    X: Ranged<ValueType = f64>,
    Y: Ranged<ValueType = f64>,
{
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<(f64, f64)> = s.points.iter().copied().filter(|p| p.0.is_finite() && p.1.is_finite()).collect();
        if s.dashed {
            chart
                .draw_series(DashedLineSeries::new(pts, 6, 4, color.stroke_width(2)))
                .map_err(plot_err)?
                .label(s.label.clone())
                .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color));
        } else {
            chart
                .draw_series(LineSeries::new(pts, color.stroke_width(2)))
                .map_err(plot_err)?
                .label(s.label.clone())
                .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color));
        }
    }
    if series.len() > 1 {
        chart
            .configure_series_labels()
            .background_style(WHITE.mix(0.8))
            .border_style(BLACK)
            .draw()
            .map_err(plot_err)?;
    }
    Ok(())
}

fn xy(t: &Table, x: &str, y: &str) -> Result<Vec<(f64, f64)>> {
    Ok(t.column(x)?.into_iter().zip(t.column(y)?).collect())
}

fn solid(label: impl Into<String>, points: Vec<(f64, f64)>) -> Series {
    Series {
        label: label.into(),
        points,
        dashed: false,
    }
}

fn dashed(label: impl Into<String>, points: Vec<(f64, f64)>) -> Series {
    Series {
        label: label.into(),
        points,
        dashed: true,
    }
}

/// Mean-field j_z on the (N_g, log10 η) plane with the Ξ = ±1 lines.
fn ground_state_plot(dir: &Path) -> Result<PathBuf> {
    let t = Table::read(&dir.join("ground_state_map.csv"))?;
    let contours = Table::read(&dir.join("xi_contours.csv"))?;
    let (eta, ng, jz) = (t.column("eta")?, t.column("ng")?, t.column("jz")?);
    let mut etas: Vec<f64> = eta.clone();
    etas.dedup();
    let ngs: Vec<f64> = ng[..t.rows.len() / etas.len().max(1)].to_vec();
    let ly: Vec<f64> = etas.iter().map(|e| e.log10()).collect();
    let edges = |c: &[f64]| -> Vec<f64> {
        let n = c.len();
        if n == 1 {
            return vec![c[0] - 0.5, c[0] + 0.5];
        }
        let mut e = vec![c[0] - 0.5 * (c[1] - c[0])];
        e.extend(c.windows(2).map(|w| 0.5 * (w[0] + w[1])));
        e.push(c[n - 1] + 0.5 * (c[n - 1] - c[n - 2]));
        e
    };
    let (xe, ye) = (edges(&ngs), edges(&ly));
    let path = dir.join("ground_state_map.svg");
    heat_map(&path, &xe, &ye, &jz, ngs.len(), &contours)?;
    Ok(path)
}

fn heat_map(path: &Path, xe: &[f64], ye: &[f64], jz: &[f64], n_ng: usize, contours: &Table) -> Result<()> {
    let root = SVGBackend::new(path, SIZE).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let mut chart = ChartBuilder::on(&root)
        .caption("mean-field j_z", ("sans-serif", 22))
        .margin(12)
        .x_label_area_size(44)
        .y_label_area_size(64)
        .build_cartesian_2d(xe[0]..xe[xe.len() - 1], ye[0]..ye[ye.len() - 1])
        .map_err(plot_err)?;
    chart.configure_mesh().x_desc("N_g").y_desc("log10 eta").draw().map_err(plot_err)?;
    let colour = |v: f64| {
        // blue (−1) to white (0) to red (+1)
        let s = v.clamp(-1.0, 1.0);
        let (r, g, b) = if s < 0.0 {
            (1.0 + s, 1.0 + s, 1.0)
        } else {
            (1.0, 1.0 - s, 1.0 - s)
        };
        RGBColor((r * 255.0) as u8, (g * 255.0) as u8, (b * 255.0) as u8)
    };
    chart
        .draw_series(jz.iter().enumerate().map(|(k, &v)| {
            let (i, j) = (k / n_ng, k % n_ng);
            Rectangle::new([(xe[j], ye[i]), (xe[j + 1], ye[i + 1])], colour(v).filled())
        }))
        .map_err(plot_err)?;
    let ce = contours.column("eta")?;
    for col in ["ng_xi_plus_one", "ng_xi_minus_one"] {
        let pts: Vec<(f64, f64)> = contours.column(col)?.into_iter().zip(&ce).map(|(g, e)| (g, e.log10())).collect();
        chart
            .draw_series(DashedLineSeries::new(pts, 6, 4, BLACK.stroke_width(2)))
            .map_err(plot_err)?;
    }
    root.present().map_err(plot_err)
}

fn timeseries_plots(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let t = Table::read(&dir.join("rabi_timeseries.csv"))?;
    let p = dir.join("rabi_jz.svg");
    line_plot(&p, "ensemble-averaged j_z", "t (ns)", "<j_z>", &[solid("<j_z>", xy(&t, "t_ns", "mean_jz")?)])?;
    out.push(p);
    let var: Vec<(f64, f64)> = xy(&t, "t_ns", "var_jz")?.into_iter().map(|(x, v)| (x, v.max(0.0).sqrt())).collect();
    let czz = xy(&t, "t_ns", "czz")?;
    let mut s = vec![solid("delta j_z", var)];
    if czz.iter().any(|p| p.1.is_finite()) {
        s.push(solid("C_zz", czz));
    }
    let p = dir.join("rabi_fluctuations.svg");
    line_plot(&p, "fluctuations and correlations", "t (ns)", "", &s)?;
    out.push(p);
    Ok(())
}

fn eta_sweep_plots(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let t = Table::read(&dir.join("eta_sweep_timeseries.csv"))?;
    let groups = t.groups("eta")?;
    let jz: Vec<Series> = groups
        .iter()
        .map(|(eta, g)| Ok(solid(format!("eta = {eta}"), xy(g, "t_ns", "mean_jz")?)))
        .collect::<Result<_>>()?;
    let p = dir.join("eta_sweep_jz.svg");
    line_plot(&p, "<j_z> versus coupling", "t (ns)", "<j_z>", &jz)?;
    out.push(p);
    let czz: Vec<Series> = groups
        .iter()
        .map(|(eta, g)| Ok(solid(format!("eta = {eta}"), xy(g, "t_ns", "czz")?)))
        .collect::<Result<_>>()?;
    let p = dir.join("eta_sweep_czz.svg");
    line_plot(&p, "C_zz versus coupling", "t (ns)", "C_zz", &czz)?;
    out.push(p);
    let t1 = Table::read(&dir.join("t1_table.csv"))?;
    let st = Table::read(&dir.join("steady_table.csv"))?;
    let p = dir.join("t1_vs_eta.svg");
    log_plot(&p, "T1 versus eta", "eta", "T1 (ns)", &[solid("T1", xy(&t1, "eta", "t1_ns")?)], true)?;
    out.push(p);
    let p = dir.join("czz_vs_eta.svg");
    log_plot(&p, "steady-state C_zz versus eta", "eta", "C_zz", &[solid("C_zz", xy(&st, "eta", "czz")?)], false)?;
    out.push(p);
    Ok(())
}

/// Step outline of histogram bins.
fn outline(t: &Table, value: &str) -> Result<Vec<(f64, f64)>> {
    let (lo, hi, v) = (t.column("bin_lo")?, t.column("bin_hi")?, t.column(value)?);
    let mut pts = Vec::with_capacity(2 * v.len() + 2);
    pts.push((lo[0], 0.0));
    for i in 0..v.len() {
        pts.push((lo[i], v[i]));
        pts.push((hi[i], v[i]));
    }
    pts.push((hi[v.len() - 1], 0.0));
    Ok(pts)
}

fn histogram_plot(dir: &Path) -> Result<PathBuf> {
    let t = Table::read(&dir.join("histograms.csv"))?;
    let series: Vec<Series> = t
        .groups("t_ns")?
        .iter()
        .map(|(time, g)| Ok(solid(format!("t = {time} ns"), outline(g, "count")?)))
        .collect::<Result<_>>()?;
    let p = dir.join("histograms.svg");
    line_plot(&p, "j_z histograms", "j_z", "count", &series)?;
    Ok(p)
}

fn render_known(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    let has = |f: &str| dir.join(f).is_file();
    if has("ground_state_map.csv") && has("xi_contours.csv") {
        out.push(ground_state_plot(dir)?);
    }
    if has("rabi_timeseries.csv") {
        timeseries_plots(dir, &mut out)?;
    }
    if has("histograms.csv") {
        out.push(histogram_plot(dir)?);
    }
    if has("eta_sweep_timeseries.csv") && has("t1_table.csv") && has("steady_table.csv") {
        eta_sweep_plots(dir, &mut out)?;
    }
    if has("ramsey.csv") {
        let t = Table::read(&dir.join("ramsey.csv"))?;
        let p = dir.join("ramsey.svg");
        line_plot(&p, "Ramsey fringe", "tau (ns)", "<j_z>", &[solid("<j_z>", xy(&t, "tau_ns", "mean_jz")?)])?;
        out.push(p);
    }
    if has("hamming.csv") {
        let t = Table::read(&dir.join("hamming.csv"))?;
        let p = dir.join("hamming.svg");
        line_plot(&p, "Hamming distance", "t (ns)", "D", &[solid("D(t)", xy(&t, "t_ns", "hamming")?)])?;
        out.push(p);
    }
    if has("r_histogram.csv") {
        let t = Table::read(&dir.join("r_histogram.csv"))?;
        let p = dir.join("r_histogram.svg");
        line_plot(
            &p,
            "gap-ratio histogram",
            "r",
            "count",
            &[solid("pooled", outline(&t, "count")?), dashed("Poisson", outline(&t, "poisson_expected")?)],
        )?;
        out.push(p);
    }
    if has("psd.csv") {
        let t = Table::read(&dir.join("psd.csv"))?;
        let p = dir.join("psd.svg");
        log_plot(
            &p,
            "gate-charge noise spectrum",
            "f (Hz)",
            "S (1/Hz)",
            &[solid("estimated", xy(&t, "f_hz", "s_estimated")?), dashed("target", xy(&t, "f_hz", "s_target")?)],
            true,
        )?;
        out.push(p);
    }
    Ok(out)
}

/// Render every recognised CSV in `dir`. When `dir` holds experiment
/// subdirectories instead, each of them is rendered.
pub fn render_dir(dir: &Path) -> Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        return Err(Error::Io(format!("{} is not a directory", dir.display())));
    }
    let mut out = render_known(dir)?;
    if out.is_empty() {
        let mut subdirs: Vec<PathBuf> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_dir())
            .collect();
        subdirs.sort();
        for d in subdirs {
            out.extend(render_known(&d)?);
        }
    }
    Ok(out)
}
