//! EPW ingestion and the daily series derived from outdoor dry-bulb temperature.
//!
//! Only the fields the reference-room model consumes are kept: dry-bulb
//! temperature and the three horizontal/normal irradiance components. Missing
//! data codes are repaired rather than rejected so that every parsed year has
//! exactly 8,760 hourly records.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const HOURS_PER_YEAR: usize = 8760;
pub const DAYS_PER_YEAR: usize = 365;

const HEADER_LINES: usize = 8;

// 0-based column indices of the EPW data record.
const COL_MONTH: usize = 1;
const COL_DAY: usize = 2;
const COL_HOUR: usize = 3;
const COL_DRY_BULB: usize = 6;
const COL_GLOBAL_HORIZONTAL: usize = 13;
const COL_DIRECT_NORMAL: usize = 14;
const COL_DIFFUSE_HORIZONTAL: usize = 15;
const MIN_COLUMNS: usize = COL_DIFFUSE_HORIZONTAL + 1;

const MISSING_IRRADIANCE: f64 = 9999.0;
const MISSING_DRY_BULB: f64 = 99.9;
const DRY_BULB_RANGE: (f64, f64) = (-90.0, 60.0);

const MONTH_DAYS: [usize; 12] = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31];

#[derive(Debug, Error)]
pub enum WeatherError {
    #[error("malformed EPW header: {0}")]
    MalformedHeader(String),
    #[error("expected 8760 hourly records after leap-day removal, found {found}")]
    BadRecordCount { found: usize },
    #[error("line {line}: cannot parse column {column} ({value:?})")]
    FieldParse { line: usize, column: usize, value: String },
    #[error("no valid dry-bulb temperature in the file")]
    NoValidDryBulb,
    #[error("running-mean weight {0} is outside (0, 1)")]
    AlphaOutOfRange(f64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteInfo {
    pub city: String,
    /// Degrees north.
    pub latitude: f64,
    /// Degrees east.
    pub longitude: f64,
    /// Hours offset from UTC.
    pub timezone: f64,
    pub elevation: f64,
}

/// One hour-ending record in local standard time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HourlyWeather {
    pub month: u8,
    pub day: u8,
    pub hour: u8,
    pub dry_bulb: f64,
    pub direct_normal: f64,
    pub diffuse_horizontal: f64,
    pub global_horizontal: f64,
}

/// Counts of values that were repaired or dropped while parsing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseDiagnostics {
    pub missing_irradiance: usize,
    pub missing_dry_bulb: usize,
    pub leap_day_records: usize,
}

impl ParseDiagnostics {
    pub fn total_missing(&self) -> usize {
        self.missing_irradiance + self.missing_dry_bulb
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpwFile {
    pub site: SiteInfo,
    pub records: Vec<HourlyWeather>,
    pub diagnostics: ParseDiagnostics,
}

/// Parse an EPW stream: 8 header lines followed by comma-separated hourly
/// records. Feb 29 records are dropped.
pub fn parse_epw<R: Read>(reader: R) -> Result<EpwFile, WeatherError> {
    let reader = BufReader::new(reader);
    let mut lines = reader.lines();

    let mut site = None;
    for idx in 0..HEADER_LINES {
        let line = lines
            .next()
            .ok_or_else(|| WeatherError::MalformedHeader(format!("file ends at header line {}", idx + 1)))??;
        if line.trim_start().to_ascii_uppercase().starts_with("LOCATION") {
            site = Some(parse_location(&line)?);
        }
    }
    let site = site.ok_or_else(|| WeatherError::MalformedHeader("missing LOCATION line".into()))?;

    let mut diagnostics = ParseDiagnostics::default();
    let mut records = Vec::with_capacity(HOURS_PER_YEAR);
    let mut dry_bulb_valid = Vec::with_capacity(HOURS_PER_YEAR);

    for (offset, line) in lines.enumerate() {
        let line = line?;
        let line_no = HEADER_LINES + offset + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < MIN_COLUMNS {
            return Err(WeatherError::FieldParse {
                line: line_no,
                column: fields.len() + 1,
                value: String::new(),
            });
        }
        let num = |column: usize| -> Result<f64, WeatherError> {
            let raw = fields[column].trim();
            raw.parse::<f64>().map_err(|_| WeatherError::FieldParse {
                line: line_no,
                column: column + 1,
                value: raw.to_string(),
            })
        };
        let int = |column: usize, max: u8| -> Result<u8, WeatherError> {
            let raw = fields[column].trim();
            match raw.parse::<u8>() {
                Ok(v) if (1..=max).contains(&v) => Ok(v),
                _ => Err(WeatherError::FieldParse {
                    line: line_no,
                    column: column + 1,
                    value: raw.to_string(),
                }),
            }
        };

        let month = int(COL_MONTH, 12)?;
        let day = int(COL_DAY, 31)?;
        let hour = int(COL_HOUR, 24)?;
        let dry_bulb = num(COL_DRY_BULB)?;
        let mut irradiance = [
            num(COL_GLOBAL_HORIZONTAL)?,
            num(COL_DIRECT_NORMAL)?,
            num(COL_DIFFUSE_HORIZONTAL)?,
        ];

        if month == 2 && day == 29 {
            diagnostics.leap_day_records += 1;
            continue;
        }

        for value in irradiance.iter_mut() {
            if !value.is_finite() || *value >= MISSING_IRRADIANCE || *value < 0.0 {
                diagnostics.missing_irradiance += 1;
                *value = 0.0;
            } else {
                // folds -0.0 into 0.0
                *value = value.max(0.0);
            }
        }

        let valid = dry_bulb.is_finite()
            && dry_bulb < MISSING_DRY_BULB
            && (DRY_BULB_RANGE.0..=DRY_BULB_RANGE.1).contains(&dry_bulb);
        if !valid {
            diagnostics.missing_dry_bulb += 1;
        }
        dry_bulb_valid.push(valid);

        records.push(HourlyWeather {
            month,
            day,
            hour,
            dry_bulb,
            direct_normal: irradiance[1],
            diffuse_horizontal: irradiance[2],
            global_horizontal: irradiance[0],
        });
    }

    if records.len() != HOURS_PER_YEAR {
        return Err(WeatherError::BadRecordCount { found: records.len() });
    }
    if diagnostics.missing_dry_bulb > 0 {
        interpolate_dry_bulb(&mut records, &dry_bulb_valid)?;
        log::warn!("{} missing dry-bulb values interpolated", diagnostics.missing_dry_bulb);
    }
    if diagnostics.missing_irradiance > 0 {
        log::warn!(
            "{} missing irradiance values set to zero",
            diagnostics.missing_irradiance
        );
    }
    if diagnostics.leap_day_records > 0 {
        log::warn!("{} Feb 29 records dropped", diagnostics.leap_day_records);
    }

    Ok(EpwFile {
        site,
        records,
        diagnostics,
    })
}

fn parse_location(line: &str) -> Result<SiteInfo, WeatherError> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() < 10 {
        return Err(WeatherError::MalformedHeader(format!(
            "LOCATION line has {} fields, expected 10",
            fields.len()
        )));
    }
    let num = |idx: usize, name: &str, lo: f64, hi: f64| -> Result<f64, WeatherError> {
        let v: f64 = fields[idx]
            .parse()
            .map_err(|_| WeatherError::MalformedHeader(format!("LOCATION {name} {:?} is not numeric", fields[idx])))?;
        if !(lo..=hi).contains(&v) {
            return Err(WeatherError::MalformedHeader(format!(
                "LOCATION {name} {v} outside [{lo}, {hi}]"
            )));
        }
        Ok(v)
    };
    Ok(SiteInfo {
        city: fields[1].to_string(),
        latitude: num(6, "latitude", -90.0, 90.0)?,
        longitude: num(7, "longitude", -180.0, 180.0)?,
        timezone: num(8, "timezone", -12.0, 14.0)?,
        elevation: num(9, "elevation", -1000.0, 9000.0)?,
    })
}

/// Linear interpolation across runs of invalid values; runs touching either
/// end of the year take the nearest valid value.
fn interpolate_dry_bulb(records: &mut [HourlyWeather], valid: &[bool]) -> Result<(), WeatherError> {
    let anchors: Vec<usize> = (0..records.len()).filter(|&i| valid[i]).collect();
    let (&first, &last) = match (anchors.first(), anchors.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(WeatherError::NoValidDryBulb),
    };
    for i in 0..first {
        records[i].dry_bulb = records[first].dry_bulb;
    }
    for i in last + 1..records.len() {
        records[i].dry_bulb = records[last].dry_bulb;
    }
    for pair in anchors.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b - a < 2 {
            continue;
        }
        let (ta, tb) = (records[a].dry_bulb, records[b].dry_bulb);
        for (k, r) in records[a + 1..b].iter_mut().enumerate() {
            let frac = (k + 1) as f64 / (b - a) as f64;
            r.dry_bulb = ta + frac * (tb - ta);
        }
    }
    Ok(())
}

/// Write a minimal EPW text carrying the fields this crate reads. Columns not
/// tracked here are filled with zeros or the conventional missing codes.
pub fn to_epw_string(site: &SiteInfo, records: &[HourlyWeather]) -> String {
    let mut out = String::with_capacity(records.len() * 120 + 512);
    let _ = writeln!(
        out,
        "LOCATION,{},-,-,synthetic,000000,{},{},{},{}",
        site.city, site.latitude, site.longitude, site.timezone, site.elevation
    );
    out.push_str("DESIGN CONDITIONS,0\n");
    out.push_str("TYPICAL/EXTREME PERIODS,0\n");
    out.push_str("GROUND TEMPERATURES,0\n");
    out.push_str("HOLIDAYS/DAYLIGHT SAVINGS,No,0,0,0\n");
    out.push_str("COMMENTS 1,\n");
    out.push_str("COMMENTS 2,\n");
    out.push_str("DATA PERIODS,1,1,Data,Sunday, 1/ 1,12/31\n");
    for r in records {
        let _ = writeln!(
            out,
            "2001,{},{},{},0,?,{},0,50,101325,0,0,300,{},{},{},0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0",
            r.month, r.day, r.hour, r.dry_bulb, r.global_horizontal, r.direct_normal, r.diffuse_horizontal
        );
    }
    out
}

/// 1-based day of year for a non-leap calendar.
pub fn day_of_year(month: u8, day: u8) -> Option<usize> {
    let m = month as usize;
    if !(1..=12).contains(&m) || day == 0 || day as usize > MONTH_DAYS[m - 1] {
        return None;
    }
    Some(MONTH_DAYS[..m - 1].iter().sum::<usize>() + day as usize)
}

/// Month (1–12) of a 0-based day index in a non-leap year.
pub fn month_of_day_index(day_index: usize) -> u8 {
    let mut remaining = day_index % DAYS_PER_YEAR;
    for (m, len) in MONTH_DAYS.iter().enumerate() {
        if remaining < *len {
            return (m + 1) as u8;
        }
        remaining -= len;
    }
    12
}

/// Month (1–12) of a 0-based hour index in a non-leap year.
pub fn month_of_hour_index(hour_index: usize) -> u8 {
    month_of_day_index(hour_index / 24)
}

pub fn daily_mean_drybulb(records: &[HourlyWeather]) -> Vec<f64> {
    records
        .chunks_exact(24)
        .map(|day| day.iter().map(|r| r.dry_bulb).sum::<f64>() / 24.0)
        .collect()
}

/// Exponentially weighted running mean of daily outdoor temperature.
///
/// The first day is seeded with the mean of the last seven days of the year so
/// that the series wraps continuously across New Year.
pub fn running_mean_outdoor(daily_means: &[f64], alpha: f64) -> Result<Vec<f64>, WeatherError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(WeatherError::AlphaOutOfRange(alpha));
    }
    let n = daily_means.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let tail = &daily_means[n.saturating_sub(7)..];
    let seed = tail.iter().sum::<f64>() / tail.len() as f64;

    let mut out = Vec::with_capacity(n);
    out.push(seed);
    for d in 1..n {
        out.push((1.0 - alpha) * daily_means[d - 1] + alpha * out[d - 1]);
    }
    Ok(out)
}

/// Trailing 30-day mean of daily outdoor temperature, wrapping into the end
/// of the year for the first month.
pub fn ground_temperature(daily_means: &[f64]) -> Vec<f64> {
    const WINDOW: usize = 30;
    let n = daily_means.len();
    if n == 0 {
        return Vec::new();
    }
    let window = WINDOW.min(n);
    (0..n)
        .map(|d| (0..window).map(|k| daily_means[(d + n - k) % n]).sum::<f64>() / window as f64)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedSeries {
    pub daily_mean_drybulb: Vec<f64>,
    pub running_mean_outdoor: Vec<f64>,
    pub ground_temp: Vec<f64>,
}

impl DerivedSeries {
    pub fn from_records(records: &[HourlyWeather], alpha: f64) -> Result<Self, WeatherError> {
        let daily = daily_mean_drybulb(records);
        Ok(Self {
            running_mean_outdoor: running_mean_outdoor(&daily, alpha)?,
            ground_temp: ground_temperature(&daily),
            daily_mean_drybulb: daily,
        })
    }
}

/// A parsed weather year together with its derived daily series and the
/// SHA-256 of the source bytes.
#[derive(Debug, Clone)]
pub struct WeatherYear {
    pub site: SiteInfo,
    pub records: Vec<HourlyWeather>,
    pub derived: DerivedSeries,
    pub diagnostics: ParseDiagnostics,
    pub sha256: String,
}

impl WeatherYear {
    pub fn from_bytes(bytes: &[u8], alpha: f64) -> Result<Self, WeatherError> {
        use sha2::{Digest, Sha256};
        let epw = parse_epw(bytes)?;
        let derived = DerivedSeries::from_records(&epw.records, alpha)?;
        Ok(Self {
            site: epw.site,
            records: epw.records,
            derived,
            diagnostics: epw.diagnostics,
            sha256: hex::encode(Sha256::digest(bytes)),
        })
    }

    pub fn from_path(path: &std::path::Path, alpha: f64) -> Result<Self, WeatherError> {
        let bytes = std::fs::read(path)?;
        Self::from_bytes(&bytes, alpha)
    }
}


#[cfg(test)]
mod tests {
    use super::testutil::*;
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn zero_file() -> String {
        to_epw_string(&site(), &year_with(|_| (0.0, 0.0, 0.0, 0.0)))
    }

    #[test]
    fn zero_file_parses() {
        let epw = parse_epw(zero_file().as_bytes()).unwrap();
        assert_eq!(epw.records.len(), HOURS_PER_YEAR);
        assert!(epw
            .records
            .iter()
            .all(|r| r.direct_normal == 0.0 && r.diffuse_horizontal == 0.0 && r.global_horizontal == 0.0));
        assert_eq!(epw.diagnostics, ParseDiagnostics::default());
        assert_eq!(epw.site.latitude, 40.2);
    }

    #[test]
    fn extra_row_is_bad_count() {
        let mut text = zero_file();
        text.push_str("2001,12,31,24,0,?,0,0,50,101325,0,0,300,0,0,0,0\n");
        match parse_epw(text.as_bytes()) {
            Err(WeatherError::BadRecordCount { found }) => assert_eq!(found, 8761),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn leap_day_is_dropped() {
        let mut text = zero_file();
        let mut extra = String::new();
        for h in 1..=24 {
            extra.push_str(&format!("2004,2,29,{h},0,?,3,0,50,101325,0,0,300,0,0,0,0\n"));
        }
        text.push_str(&extra);
        let epw = parse_epw(text.as_bytes()).unwrap();
        assert_eq!(epw.records.len(), HOURS_PER_YEAR);
        assert_eq!(epw.diagnostics.leap_day_records, 24);
    }

    #[test]
    fn missing_location() {
        let text = zero_file().replacen("LOCATION", "LOCALE", 1);
        assert!(matches!(
            parse_epw(text.as_bytes()),
            Err(WeatherError::MalformedHeader(_))
        ));
    }

    #[test]
    fn non_numeric_field() {
        let text = zero_file().replacen("2001,1,1,1,0,?,0,", "2001,1,1,1,0,?,abc,", 1);
        match parse_epw(text.as_bytes()) {
            Err(WeatherError::FieldParse { line, column, value }) => {
                assert_eq!((line, column, value.as_str()), (9, 7, "abc"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_codes_are_repaired() {
        let mut records = year_with(|i| (i as f64 * 0.001, 100.0, 50.0, 120.0));
        records[10].direct_normal = 9999.0;
        records[11].global_horizontal = 9999.0;
        records[100].dry_bulb = 99.9;
        records[101].dry_bulb = 99.9;
        let epw = parse_epw(to_epw_string(&site(), &records).as_bytes()).unwrap();
        assert_eq!(epw.diagnostics.missing_irradiance, 2);
        assert_eq!(epw.diagnostics.missing_dry_bulb, 2);
        assert_eq!(epw.records[10].direct_normal, 0.0);
        assert_eq!(epw.records[11].global_horizontal, 0.0);
        assert!((epw.records[100].dry_bulb - 0.100).abs() < 1e-9);
        assert!((epw.records[101].dry_bulb - 0.101).abs() < 1e-9);
    }

    #[test]
    fn calendar_helpers() {
        assert_eq!(day_of_year(1, 1), Some(1));
        assert_eq!(day_of_year(3, 22), Some(81));
        assert_eq!(day_of_year(12, 31), Some(365));
        assert_eq!(day_of_year(2, 29), None);
        assert_eq!(month_of_day_index(0), 1);
        assert_eq!(month_of_day_index(59), 3);
        assert_eq!(month_of_hour_index(8759), 12);
    }

    #[test]
    fn daily_means() {
        let constant = year_with(|_| (10.0, 0.0, 0.0, 0.0));
        assert!(daily_mean_drybulb(&constant).iter().all(|&v| v == 10.0));

        let alternating = year_with(|i| (if i % 2 == 0 { 0.0 } else { 20.0 }, 0.0, 0.0, 0.0));
        assert_eq!(daily_mean_drybulb(&alternating)[0], 10.0);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let random = year_with(|_| (rng.gen_range(-10.0..40.0), 0.0, 0.0, 0.0));
        let means = daily_mean_drybulb(&random);
        assert_eq!(means.len(), DAYS_PER_YEAR);
        for d in 0..DAYS_PER_YEAR {
            let mut acc = 0.0;
            for h in 0..24 {
                acc += random[d * 24 + h].dry_bulb;
            }
            assert!((means[d] - acc / 24.0).abs() < 1e-12);
        }
        let hourly_mean = random.iter().map(|r| r.dry_bulb).sum::<f64>() / 8760.0;
        let daily_mean = means.iter().sum::<f64>() / 365.0;
        assert!((hourly_mean - daily_mean).abs() < 1e-9);
    }

    #[test]
    fn running_mean_examples() {
        let constant = vec![10.0; DAYS_PER_YEAR];
        assert!(running_mean_outdoor(&constant, 0.8)
            .unwrap()
            .iter()
            .all(|&v| (v - 10.0).abs() < 1e-12));

        // seed of 10 from a flat tail, then one warm day
        let mut series = vec![10.0; DAYS_PER_YEAR];
        series[0] = 15.0;
        let rm = running_mean_outdoor(&series, 0.8).unwrap();
        assert!((rm[1] - 11.0).abs() < 1e-12);

        assert!(matches!(
            running_mean_outdoor(&constant, 1.0),
            Err(WeatherError::AlphaOutOfRange(_))
        ));
        assert!(running_mean_outdoor(&constant, 0.0).is_err());
    }

    #[test]
    fn ground_temperature_examples() {
        assert!(ground_temperature(&[10.0; DAYS_PER_YEAR])
            .iter()
            .all(|&v| (v - 10.0).abs() < 1e-12));

        let step: Vec<f64> = (0..DAYS_PER_YEAR).map(|d| if d < 180 { 0.0 } else { 30.0 }).collect();
        let g = ground_temperature(&step);
        for d in 180..209 {
            assert!(g[d + 1] > g[d]);
        }
        assert_eq!(g[179], 0.0);
        assert_eq!(g[209], 30.0);

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let random: Vec<f64> = (0..DAYS_PER_YEAR).map(|_| rng.gen_range(-5.0..30.0)).collect();
        let g = ground_temperature(&random);
        for (d, got) in g.iter().enumerate() {
            let mut acc = 0.0;
            for back in 0..30i64 {
                let idx = (d as i64 - back).rem_euclid(365) as usize;
                acc += random[idx];
            }
            assert!((got - acc / 30.0).abs() < 1e-9);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn running_mean_stays_within_envelope(
            series in proptest::collection::vec(-20.0f64..40.0, DAYS_PER_YEAR)
        ) {
            let rm = running_mean_outdoor(&series, 0.8).unwrap();
            let seed = rm[0];
            let lo = series.iter().cloned().fold(seed, f64::min);
            let hi = series.iter().cloned().fold(seed, f64::max);
            for v in rm {
                prop_assert!(v >= lo - 1e-9 && v <= hi + 1e-9);
            }
        }

        #[test]
        fn reserialize_is_idempotent(
            temps in proptest::collection::vec(-30.0f64..45.0, 24),
            rad in proptest::collection::vec(0.0f64..1000.0, 24),
        ) {
            let records = year_with(|i| (temps[i % 24], rad[i % 24], rad[(i + 5) % 24], rad[(i + 9) % 24]));
            let first = parse_epw(to_epw_string(&site(), &records).as_bytes()).unwrap();
            let second = parse_epw(to_epw_string(&first.site, &first.records).as_bytes()).unwrap();
            prop_assert_eq!(&first.records, &records);
            prop_assert_eq!(first, second);
        }
    }
}
