//! Panel CSV reading and writing.
//!
//! One row per company-year with the header
//! `company_id,industry,year,IR,EQ,MG,EPS,CEOtot,REV,Earn,Eprof,MCap,TSR`
//! (columns may appear in any order). Dollar amounts are in millions.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::pipeline::{Company, Industry, Observation, PanelDataset};

pub const PANEL_COLUMNS: [&str; 13] = [
    "company_id",
    "industry",
    "year",
    "IR",
    "EQ",
    "MG",
    "EPS",
    "CEOtot",
    "REV",
    "Earn",
    "Eprof",
    "MCap",
    "TSR",
];

struct Record {
    row: usize,
    year: i32,
    obs: Observation,
}

/// Reads and validates a panel file.
pub fn load_panel(path: impl AsRef<Path>) -> Result<PanelDataset> {
    let path = path.as_ref();
    let name = path.display().to_string();
    let err = |row: usize, message: String| Error::Csv {
        path: name.clone(),
        row,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Io(format!("{name}: {e}")))?;
    let headers = reader.headers().map_err(|e| err(1, e.to_string()))?.clone();
    let mut pos = [0usize; 13];
    for (k, col) in PANEL_COLUMNS.iter().enumerate() {
        pos[k] = headers
            .iter()
            .position(|h| h == *col)
            .ok_or_else(|| err(1, format!("missing column {col:?}")))?;
    }

    let mut companies: Vec<Company> = Vec::new();
    let mut lookup: HashMap<String, usize> = HashMap::new();
    let mut records: Vec<Vec<Record>> = Vec::new();
    for (k, rec) in reader.records().enumerate() {
        let row = k + 2;
        let rec = rec.map_err(|e| err(row, e.to_string()))?;
        let field = |c: usize| -> Result<&str> {
            let v = rec.get(pos[c]).unwrap_or("");
            if v.is_empty() {
                Err(err(row, format!("missing value for {}", PANEL_COLUMNS[c])))
            } else {
                Ok(v)
            }
        };
        let id = field(0)?.to_string();
        let industry: Industry = field(1)?
            .parse()
            .map_err(|e: Error| err(row, e.to_string()))?;
        let year: i32 = field(2)?
            .parse()
            .map_err(|_| err(row, format!("bad year {:?}", rec.get(pos[2]))))?;
        let mut vals = [0.0; 10];
        for (v, c) in vals.iter_mut().zip(3..13) {
            let s = field(c)?;
            *v = s
                .parse()
                .ok()
                .filter(|x: &f64| x.is_finite())
                .ok_or_else(|| err(row, format!("bad number {s:?} for {}", PANEL_COLUMNS[c])))?;
        }
        let obs = Observation {
            ir: vals[0],
            eq: vals[1],
            mg: vals[2],
            eps: vals[3],
            ceo_tot: vals[4],
            rev: vals[5],
            earn: vals[6],
            eprof: vals[7],
            mcap: vals[8],
            tsr: vals[9],
        };
        let idx = match lookup.get(&id) {
            Some(&i) => {
                if companies[i].industry != industry {
                    return Err(err(row, format!("industry of {id:?} changes to {industry}")));
                }
                i
            }
            None => {
                lookup.insert(id.clone(), companies.len());
                companies.push(Company { id, industry });
                records.push(Vec::new());
                companies.len() - 1
            }
        };
        records[idx].push(Record { row, year, obs });
    }
    if companies.is_empty() {
        return Err(err(2, "no data rows".into()));
    }

    let mut range: Option<(i32, i32)> = None;
    let mut series = Vec::with_capacity(companies.len());
    for (c, recs) in records.iter_mut().enumerate() {
        recs.sort_by_key(|r| r.year);
        for pair in recs.windows(2) {
            if pair[1].year == pair[0].year {
                return Err(err(
                    pair[1].row,
                    format!("duplicate (company, year) ({:?}, {})", companies[c].id, pair[1].year),
                ));
            }
            if pair[1].year != pair[0].year + 1 {
                return Err(err(
                    pair[1].row,
                    format!(
                        "non-contiguous years for {:?}: {} -> {}",
                        companies[c].id, pair[0].year, pair[1].year
                    ),
                ));
            }
        }
        let lo = recs[0].year;
        let hi = recs[recs.len() - 1].year;
        match range {
            None => range = Some((lo, hi)),
            Some((a, b)) if (a, b) != (lo, hi) => {
                let missing = if lo > a { a } else if hi < b { b } else if lo < a { lo } else { hi };
                return Err(err(
                    recs[0].row,
                    format!(
                        "missing cell: company {:?} covers {lo}..={hi} but the panel covers {a}..={b} (year {missing})",
                        companies[c].id
                    ),
                ));
            }
            _ => {}
        }
        series.push(recs.iter().map(|r| r.obs).collect());
    }
    let (first, _) = range.expect("at least one company");
    PanelDataset::new(companies, first, series)
}

/// Writes a panel in the layout read by [`load_panel`], rows ordered by
/// company then year. Numbers use the shortest round-trip representation.
pub fn write_panel(panel: &PanelDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(PANEL_COLUMNS).map_err(io)?;
    for (c, company) in panel.companies().iter().enumerate() {
        for (k, obs) in panel.series(c).iter().enumerate() {
            let mut rec = vec![
                company.id.clone(),
                company.industry.to_string(),
                (panel.first_year() + k as i32).to_string(),
            ];
            rec.extend(obs.values().iter().map(|v| v.to_string()));
            w.write_record(&rec).map_err(io)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    const HEADER: &str = "company_id,industry,year,IR,EQ,MG,EPS,CEOtot,REV,Earn,Eprof,MCap,TSR\n";

    fn row(id: &str, ind: &str, year: i32) -> String {
        format!("{id},{ind},{year},1.1,0.02,0.9,0.1,12.5,5000,400,-30,8000,0.12\n")
    }

    fn write(body: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(HEADER.as_bytes()).unwrap();
        f.write_all(body.as_bytes()).unwrap();
        f
    }

    #[test]
    fn two_companies_ten_years() {
        let mut body = String::new();
        for id in ["AAA", "BBB"] {
            for y in 2009..2019 {
                body.push_str(&row(id, "tech", y));
            }
        }
        let f = write(&body);
        let p = load_panel(f.path()).unwrap();
        assert_eq!(p.n_observations(), 20);
        assert_eq!(p.first_year(), 2009);
        assert_eq!(p.get(1, 2012).unwrap().eprof, -30.0);
    }

    #[test]
    fn unknown_industry_names_row() {
        let f = write(&(row("A", "tech", 2009) + &row("B", "airline", 2009)));
        match load_panel(f.path()) {
            Err(Error::Csv { row, message, .. }) => {
                assert_eq!(row, 3);
                assert!(message.contains("airline"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn year_gap_is_rejected() {
        let f = write(&(row("A", "tech", 2011) + &row("A", "tech", 2012) + &row("A", "tech", 2014)));
        match load_panel(f.path()) {
            Err(Error::Csv { row, message, .. }) => {
                assert_eq!(row, 4);
                assert!(message.contains("non-contiguous years"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicates_and_ragged_companies() {
        let f = write(&(row("A", "tech", 2011) + &row("A", "tech", 2011)));
        assert!(matches!(load_panel(f.path()), Err(Error::Csv { row: 3, .. })));
        let f = write(&(row("A", "tech", 2011) + &row("A", "tech", 2012) + &row("B", "tech", 2011)));
        match load_panel(f.path()) {
            Err(Error::Csv { message, .. }) => assert!(message.contains("missing cell"), "{message}"),
            other => panic!("unexpected {other:?}"),
        }
        let f = write("A,tech,2011,1,2,3,4,,6,7,8,9,10\n");
        match load_panel(f.path()) {
            Err(Error::Csv { row: 2, message, .. }) => assert!(message.contains("CEOtot")),
            other => panic!("unexpected {other:?}"),
        }
    }
}
