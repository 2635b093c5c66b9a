use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub suite: String,
    pub check: String,
    pub case: String,
    pub measured: String,
    pub bound: String,
    pub pass: bool,
}

pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.6e}")
    } else {
        format!("{x}")
    }
}

/// Rows and artifact files of one suite, in emission order.
#[derive(Debug, Default)]
pub struct SuiteOutput {
    pub rows: Vec<Row>,
    pub files: Vec<(String, Vec<u8>)>,
}

impl SuiteOutput {
    pub fn row(&mut self, suite: &str, check: &str, case: impl Into<String>, measured: f64, bound: f64, pass: bool) {
        self.rows.push(Row {
            suite: suite.into(),
            check: check.into(),
            case: case.into(),
            measured: num(measured),
            bound: num(bound),
            pass,
        });
    }

    /// Runs one check; an error becomes a failing row carrying the message.
    pub fn guard(&mut self, suite: &str, check: &str, f: impl FnOnce(&mut SuiteOutput) -> anyhow::Result<()>) {
        if let Err(e) = f(self) {
            self.rows.push(Row {
                suite: suite.into(),
                check: check.into(),
                case: format!("error: {e}"),
                measured: "nan".into(),
                bound: "nan".into(),
                pass: false,
            });
        }
    }
}

pub fn write_csv(rows: &[Row]) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(w.into_inner()?)
}
