//! Sweep axis syntax: comma-separated items, each a value or a
//! `start:stop` / `start:step:stop` range.

pub fn parse_axis(spec: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim) {
        if item.is_empty() {
            return Err(format!("empty item in `{spec}`"));
        }
        out.extend(parse_item(item)?);
    }
    Ok(out)
}

/// Axis restricted to positive integers, for horizons.
pub fn parse_count_axis(spec: &str) -> Result<Vec<usize>, String> {
    parse_axis(spec)?
        .into_iter()
        .map(|v| {
            if v >= 1.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(format!("`{spec}`: {v} is not a positive integer"))
            }
        })
        .collect()
}

fn parse_item(item: &str) -> Result<Vec<f64>, String> {
    let nums = item
        .split(':')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("`{s}` in `{item}` is not a number"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let (start, step, stop) = match nums[..] {
        [v] => return Ok(vec![v]),
        [a, b] => (a, 1.0, b),
        [a, s, b] => (a, s, b),
        _ => return Err(format!("`{item}`: expected start:stop or start:step:stop")),
    };
    if step == 0.0 {
        return Err(format!("`{item}`: step must be nonzero"));
    }
    let span = (stop - start) / step;
    if span < -1e-9 {
        return Err(format!("`{item}`: step does not lead from start to stop"));
    }
    let n = (span + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| start + i as f64 * step).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        assert_eq!(
            parse_axis("11:15").unwrap(),
            vec![11.0, 12.0, 13.0, 14.0, 15.0]
        );
        assert_eq!(
            parse_axis("2:2:10").unwrap(),
            vec![2.0, 4.0, 6.0, 8.0, 10.0]
        );
        assert_eq!(
            parse_axis("70:-10:40").unwrap(),
            vec![70.0, 60.0, 50.0, 40.0]
        );
        assert_eq!(parse_axis("66").unwrap(), vec![66.0]);
        assert_eq!(parse_axis("40,66, 70").unwrap(), vec![40.0, 66.0, 70.0]);
        assert_eq!(parse_axis("0:0.1:0.3").unwrap().len(), 4);
    }

    #[test]
    fn rejects() {
        for bad in ["", "a", "1:0:5", "5:1:1", "1:2:3:4", "1,,2", "nan"] {
            assert!(parse_axis(bad).is_err(), "{bad}");
        }
        assert!(parse_count_axis("0:3").is_err());
        assert!(parse_count_axis("1.5").is_err());
        assert_eq!(parse_count_axis("11:13").unwrap(), vec![11, 12, 13]);
    }
}
