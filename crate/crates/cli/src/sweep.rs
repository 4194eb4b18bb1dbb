use std::str::FromStr;

/// `<name>:<start>:<stop>:<count>`, an inclusive linear grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| if k + 1 == self.count { self.stop } else { self.start + step * k as f64 })
            .collect()
    }

    pub fn expect_one_of(&self, names: &[&str]) -> Result<(), String> {
        if names.contains(&self.name.as_str()) {
            Ok(())
        } else {
            Err(format!("cannot sweep '{}' here; expected one of {}", self.name, names.join(", ")))
        }
    }
}

impl FromStr for SweepSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [name, start, stop, count] = parts[..] else {
            return Err(format!("expected name:start:stop:count, got '{s}'"));
        };
        let num = |x: &str| x.parse::<f64>().map_err(|e| format!("bad number '{x}': {e}"));
        let (start, stop) = (num(start)?, num(stop)?);
        if !start.is_finite() || !stop.is_finite() {
            return Err("sweep bounds must be finite".into());
        }
        let count = count.parse::<usize>().map_err(|e| format!("bad count '{count}': {e}"))?;
        if count < 2 {
            return Err(format!("sweep needs at least 2 points, got {count}"));
        }
        Ok(Self {
            name: name.to_string(),
            start,
            stop,
            count,
        })
    }
}

impl std::fmt::Display for SweepSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}:{}", self.name, self.start, self.stop, self.count)
    }
}
