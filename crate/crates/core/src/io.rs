//! File formats: plan matrices as CSV, attribute schemas and answer scripts
//! as JSON.
//!
//! Plan CSV: a mandatory header `plan_id,<attr1>,...,<attrN>`, then one row
//! per plan with decimal expected subutilities. The `plan_id` cell becomes
//! the plan's label; ids are assigned by row order starting at 0.

use std::io::{Read, Write};

use crate::elicitation::Answer;
use crate::error::{Error, Result};
use crate::frontier::{ColumnDescriptor, PlanMatrix, PlanRecord};
use crate::utility::ScaledAttribute;

#[derive(Debug, Clone, PartialEq)]
pub struct PlanTable {
    pub attributes: Vec<String>,
    pub plans: Vec<PlanRecord>,
}

impl PlanTable {
    pub fn matrix(&self) -> Result<PlanMatrix> {
        let columns = self
            .attributes
            .iter()
            .enumerate()
            .map(|(i, name)| ColumnDescriptor::attribute(i, name.clone()))
            .collect();
        PlanMatrix::new(self.plans.clone(), columns)
    }

    /// Checks that the CSV columns are the schema's attributes, in order.
    pub fn check_attributes(&self, schema: &[ScaledAttribute]) -> Result<()> {
        if schema.len() != self.attributes.len() {
            return Err(Error::dims(schema.len(), self.attributes.len()));
        }
        for (column, attr) in self.attributes.iter().zip(schema) {
            if column != attr.name() {
                return Err(Error::InvalidMatrix(format!(
                    "plan column `{column}` does not match attribute `{}`",
                    attr.name()
                )));
            }
        }
        Ok(())
    }
}

pub fn read_plans_csv(reader: impl Read) -> Result<PlanTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| Error::Parse(format!("plan CSV header: {e}")))?
        .clone();
    if header.get(0) != Some("plan_id") {
        return Err(Error::Parse("plan CSV must start with a `plan_id` column".into()));
    }
    let attributes: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    if attributes.is_empty() {
        return Err(Error::Parse("plan CSV has no attribute columns".into()));
    }
    let mut plans = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let line = row + 2;
        let record = record.map_err(|e| Error::Parse(format!("plan CSV line {line}: {e}")))?;
        if record.len() != header.len() {
            return Err(Error::Parse(format!(
                "plan CSV line {line}: expected {} cells, found {}",
                header.len(),
                record.len()
            )));
        }
        let w = record
            .iter()
            .skip(1)
            .map(|cell| {
                cell.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::Parse(format!("plan CSV line {line}: bad number `{cell}`")))
            })
            .collect::<Result<Vec<f64>>>()?;
        plans.push(PlanRecord {
            id: row,
            label: record[0].to_string(),
            w,
        });
    }
    Ok(PlanTable { attributes, plans })
}

pub fn write_plans_csv(matrix: &PlanMatrix, writer: impl Write) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let io_err = |e: csv::Error| Error::Parse(e.to_string());
    let mut header = vec!["plan_id".to_string()];
    header.extend(matrix.columns().iter().map(|c| c.label.clone()));
    wtr.write_record(&header).map_err(io_err)?;
    for plan in matrix.plans() {
        let mut row = vec![plan.label.clone()];
        row.extend(plan.w.iter().map(|x| x.to_string()));
        wtr.write_record(&row).map_err(io_err)?;
    }
    wtr.flush().map_err(|e| Error::Parse(e.to_string()))
}

/// A JSON array of attribute objects.
pub fn parse_attributes_json(text: &str) -> Result<Vec<ScaledAttribute>> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("attribute schema: {e}")))
}

/// A JSON array of answers, consumed in order.
pub fn parse_answers_json(text: &str) -> Result<Vec<Answer>> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("answer script: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_plan_csv() {
        let csv = "plan_id,A,B\nalpha,0.5,0.25\nbeta,1,0\n";
        let table = read_plans_csv(csv.as_bytes()).unwrap();
        assert_eq!(table.attributes, vec!["A", "B"]);
        assert_eq!(table.plans[1].label, "beta");
        assert_eq!(table.plans[1].id, 1);
        assert_eq!(table.plans[0].w, vec![0.5, 0.25]);
    }

    #[test]
    fn rejects_malformed_csv() {
        assert!(read_plans_csv("id,A\nx,1\n".as_bytes()).is_err());
        let err = read_plans_csv("plan_id,A,B\nx,1\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(read_plans_csv("plan_id,A\nx,abc\n".as_bytes()).is_err());
        assert!(read_plans_csv("plan_id,A\nx,NaN\n".as_bytes()).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let csv = "plan_id,A,B\nalpha,0.5,0.25\nbeta,1,0\n";
        let table = read_plans_csv(csv.as_bytes()).unwrap();
        let mut out = Vec::new();
        write_plans_csv(&table.matrix().unwrap(), &mut out).unwrap();
        assert_eq!(read_plans_csv(out.as_slice()).unwrap(), table);
    }

    #[test]
    fn attribute_schema_parses_and_validates() {
        let ok = r#"[
          {"name":"COST","kind":"continuous","worst":50000,"best":0,
           "subutility":{"type":"piecewise_linear","points":[[0,1],[50000,0]]}},
          {"name":"BLEED","kind":"discrete","worst":1,"best":0,
           "subutility":{"type":"tabulated","points":[[0,1],[1,0]]}}
        ]"#;
        let attrs = parse_attributes_json(ok).unwrap();
        assert_eq!(attrs.len(), 2);
        assert_eq!(attrs[0].eval(&25_000.0.into()).unwrap(), 0.5);

        let unscaled = r#"[{"name":"X","kind":"continuous","worst":0,"best":1,
           "subutility":{"type":"piecewise_linear","points":[[0,0],[1,0.9]]}}]"#;
        assert!(parse_attributes_json(unscaled).is_err());
    }
}
