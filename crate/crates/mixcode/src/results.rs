//! CSV tables for experiment results and training traces.

use mixcode_core::corpus::Task;
use mixcode_core::eval::{percent, CellResult};

fn cell_columns(r: &CellResult) -> [String; 4] {
    [
        r.cell.model.name().to_string(),
        r.cell.strategy_label(),
        r.cell.alpha.map_or("-".into(), |a| a.to_string()),
        r.cell.subset.clone().unwrap_or_else(|| "-".into()),
    ]
}

fn pct(x: f64) -> String {
    format!("{:.2}", percent(x))
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv output is UTF-8")
}

/// One row per cell; fractions are reported in percent with two decimals.
pub fn results_csv(dataset: &str, task: Task, rows: &[CellResult]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "dataset",
        "task",
        "model",
        "strategy",
        "alpha",
        "method_subset",
        "runs",
        "acc_mean",
        "acc_std",
        "rob_mean",
        "rob_std",
        "status",
    ])
    .expect("in-memory write");
    for r in rows {
        let [model, strategy, alpha, subset] = cell_columns(r);
        let (runs, stats) = match &r.report {
            Ok(e) => (
                e.runs.to_string(),
                [
                    pct(e.accuracy.mean),
                    pct(e.accuracy.std),
                    pct(e.robustness.mean),
                    pct(e.robustness.std),
                ],
            ),
            Err(_) => (r.runs.len().to_string(), ["".into(), "".into(), "".into(), "".into()]),
        };
        let mut record = vec![
            dataset.to_string(),
            task.name().into(),
            model,
            strategy,
            alpha,
            subset,
            runs,
        ];
        record.extend(stats);
        record.push(r.status());
        w.write_record(&record).expect("in-memory write");
    }
    finish(w)
}

/// Per-epoch loss and held-out accuracy of every run.
pub fn traces_csv(rows: &[CellResult]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "model",
        "strategy",
        "alpha",
        "method_subset",
        "run",
        "epoch",
        "loss",
        "heldout_acc",
    ])
    .expect("in-memory write");
    for r in rows {
        let cols = cell_columns(r);
        for run in &r.runs {
            for (e, (loss, acc)) in run.trace.loss.iter().zip(&run.trace.heldout_accuracy).enumerate() {
                let mut record = cols.to_vec();
                record.extend([
                    run.seed.to_string(),
                    (e + 1).to_string(),
                    loss.to_string(),
                    acc.map_or(String::new(), |a| a.to_string()),
                ]);
                w.write_record(&record).expect("in-memory write");
            }
        }
    }
    finish(w)
}

/// Mean robustness per refactoring method for every successful cell.
pub fn per_method_csv(rows: &[CellResult]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["model", "strategy", "alpha", "method_subset", "method", "rob_mean"])
        .expect("in-memory write");
    for r in rows {
        let Ok(report) = &r.report else { continue };
        let cols = cell_columns(r);
        for (method, v) in &report.per_method {
            let mut record = cols.to_vec();
            record.extend([method.clone(), pct(*v)]);
            w.write_record(&record).expect("in-memory write");
        }
    }
    finish(w)
}
