//! Deterministic numeric CSV ingestion: comma separators, '.' decimals,
//! no quoting, no locale handling. A single header row is auto-detected
//! when the first line has any non-numeric cell.

#[derive(Debug)]
pub struct ParsedCsv {
    pub rows: Vec<Vec<f64>>,
    pub header: Option<Vec<String>>,
}

pub fn parse_numeric_csv(text: &str) -> Result<ParsedCsv, String> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut header: Option<Vec<String>> = None;
    let mut expected_width: Option<usize> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let mut parsed: Vec<f64> = Vec::with_capacity(cells.len());
        let mut bad_cell: Option<usize> = None;
        for (ci, cell) in cells.iter().enumerate() {
            match cell.parse::<f64>() {
                Ok(v) => parsed.push(v),
                Err(_) => {
                    bad_cell = Some(ci);
                    break;
                }
            }
        }
        if let Some(ci) = bad_cell {
            if rows.is_empty() && header.is_none() {
                // non-numeric first line: treat as header
                header = Some(cells.iter().map(|s| s.to_string()).collect());
                expected_width = Some(cells.len());
                continue;
            }
            return Err(format!(
                "line {}, column {}: {:?} is not a number",
                lineno + 1,
                ci + 1,
                cells[ci]
            ));
        }
        if let Some(w) = expected_width {
            if parsed.len() != w {
                return Err(format!(
                    "line {}: {} cells, expected {}",
                    lineno + 1,
                    parsed.len(),
                    w
                ));
            }
        } else {
            expected_width = Some(parsed.len());
        }
        rows.push(parsed);
    }
    if rows.is_empty() {
        return Err("no data rows".into());
    }
    Ok(ParsedCsv { rows, header })
}

pub fn transpose(rows: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    if rows.is_empty() {
        return rows;
    }
    let (r, c) = (rows.len(), rows[0].len());
    (0..c)
        .map(|j| (0..r).map(|i| rows[i][j]).collect())
        .collect()
}
