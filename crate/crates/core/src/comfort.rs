//! Adaptive comfort limits and degree-hours of discomfort.

use std::fmt;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::weather::{month_of_hour_index, HOURS_PER_YEAR};

#[derive(Debug, Error, PartialEq)]
pub enum ComfortError {
    #[error("unknown comfort category {0:?} (expected I, II or III)")]
    UnknownCategory(String),
    #[error("month {0} outside 1..=12")]
    MonthOutOfRange(u8),
    #[error("unknown season scheme {0:?}")]
    UnknownSeasonScheme(String),
    #[error("length mismatch: {hours} hourly temperatures, {days} daily running means")]
    LengthMismatch { hours: usize, days: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Category {
    I,
    #[default]
    II,
    III,
}

impl Category {
    /// Half-width of the comfort band, K.
    pub fn halfwidth(self) -> f64 {
        match self {
            Category::I => 2.0,
            Category::II => 3.0,
            Category::III => 4.0,
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::I => "I",
            Category::II => "II",
            Category::III => "III",
        })
    }
}

impl FromStr for Category {
    type Err = ComfortError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(Category::I),
            "II" | "2" => Ok(Category::II),
            "III" | "3" => Ok(Category::III),
            _ => Err(ComfortError::UnknownCategory(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComfortLimits {
    pub lower: f64,
    pub upper: f64,
    pub comfort_temp: f64,
}

/// Adaptive limits for naturally ventilated spaces. The running mean is
/// clamped to the chart's [10, 30] °C domain first.
pub fn comfort_limits(theta_rm: f64, category: Category) -> ComfortLimits {
    let comfort_temp = 0.33 * theta_rm.clamp(10.0, 30.0) + 18.8;
    let half = category.halfwidth();
    ComfortLimits {
        lower: comfort_temp - half,
        upper: comfort_temp + half,
        comfort_temp,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DegreeHours {
    pub hdh: f64,
    pub cdh: f64,
    pub tdh: f64,
}

impl DegreeHours {
    pub fn new(hdh: f64, cdh: f64) -> Self {
        Self {
            hdh,
            cdh,
            tdh: hdh + cdh,
        }
    }

    pub fn cdh_ratio(&self) -> f64 {
        if self.tdh > 0.0 {
            self.cdh / self.tdh
        } else {
            0.0
        }
    }
}

impl Add for DegreeHours {
    type Output = DegreeHours;

    fn add(self, rhs: Self) -> Self {
        DegreeHours::new(self.hdh + rhs.hdh, self.cdh + rhs.cdh)
    }
}

impl AddAssign for DegreeHours {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

/// Degree-hours contributed by one hour at operative temperature `t_op`.
pub fn degree_hours_hour(t_op: f64, limits: &ComfortLimits) -> DegreeHours {
    DegreeHours::new((limits.lower - t_op).max(0.0), (t_op - limits.upper).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Season {
    Winter,
    Spring,
    Summer,
    Autumn,
}

impl Season {
    pub const ALL: [Season; 4] = [Season::Winter, Season::Spring, Season::Summer, Season::Autumn];

    pub fn as_str(self) -> &'static str {
        match self {
            Season::Winter => "winter",
            Season::Spring => "spring",
            Season::Summer => "summer",
            Season::Autumn => "autumn",
        }
    }
}

impl fmt::Display for Season {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Month-to-season assignment.
///
/// Accepted spellings: `meteorological` (Dec–Feb winter), `quarterly`
/// (Jan–Mar winter) or a twelve-letter code over `W`, `S` (spring),
/// `U` (summer) and `A`, one letter per month starting in January.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SeasonScheme {
    months: [Season; 12],
}

impl SeasonScheme {
    pub fn meteorological() -> Self {
        "WWSSSUUUAAAW".parse().expect("valid code")
    }

    pub fn quarterly() -> Self {
        "WWWSSSUUUAAA".parse().expect("valid code")
    }

    pub fn season_of(&self, month: u8) -> Result<Season, ComfortError> {
        if !(1..=12).contains(&month) {
            return Err(ComfortError::MonthOutOfRange(month));
        }
        Ok(self.months[month as usize - 1])
    }

    pub fn code(&self) -> String {
        self.months
            .iter()
            .map(|s| match s {
                Season::Winter => 'W',
                Season::Spring => 'S',
                Season::Summer => 'U',
                Season::Autumn => 'A',
            })
            .collect()
    }
}

impl Default for SeasonScheme {
    fn default() -> Self {
        Self::meteorological()
    }
}

impl FromStr for SeasonScheme {
    type Err = ComfortError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "meteorological" => return Ok(Self::meteorological()),
            "quarterly" => return Ok(Self::quarterly()),
            _ => {}
        }
        let letters: Vec<char> = t.to_ascii_uppercase().chars().collect();
        if letters.len() != 12 {
            return Err(ComfortError::UnknownSeasonScheme(s.to_string()));
        }
        let mut months = [Season::Winter; 12];
        for (slot, c) in months.iter_mut().zip(letters) {
            *slot = match c {
                'W' => Season::Winter,
                'S' => Season::Spring,
                'U' => Season::Summer,
                'A' => Season::Autumn,
                _ => return Err(ComfortError::UnknownSeasonScheme(s.to_string())),
            };
        }
        Ok(Self { months })
    }
}

impl TryFrom<String> for SeasonScheme {
    type Error = ComfortError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<SeasonScheme> for String {
    fn from(s: SeasonScheme) -> String {
        if s == SeasonScheme::meteorological() {
            "meteorological".into()
        } else if s == SeasonScheme::quarterly() {
            "quarterly".into()
        } else {
            s.code()
        }
    }
}

/// Season of a month under the default meteorological scheme.
pub fn season_of(month: u8) -> Result<Season, ComfortError> {
    SeasonScheme::meteorological().season_of(month)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SeasonalBreakdown {
    pub annual: DegreeHours,
    pub winter: DegreeHours,
    pub spring: DegreeHours,
    pub summer: DegreeHours,
    pub autumn: DegreeHours,
}

impl SeasonalBreakdown {
    pub fn season(&self, season: Season) -> &DegreeHours {
        match season {
            Season::Winter => &self.winter,
            Season::Spring => &self.spring,
            Season::Summer => &self.summer,
            Season::Autumn => &self.autumn,
        }
    }

    fn season_mut(&mut self, season: Season) -> &mut DegreeHours {
        match season {
            Season::Winter => &mut self.winter,
            Season::Spring => &mut self.spring,
            Season::Summer => &mut self.summer,
            Season::Autumn => &mut self.autumn,
        }
    }

    /// Builds the breakdown from the four seasons; the annual totals are their sum.
    pub fn from_seasons(winter: DegreeHours, spring: DegreeHours, summer: DegreeHours, autumn: DegreeHours) -> Self {
        Self {
            annual: winter + spring + summer + autumn,
            winter,
            spring,
            summer,
            autumn,
        }
    }
}

/// Comfort settings shared by simulation commands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ComfortSettings {
    pub category: Category,
    pub seasons: SeasonScheme,
    /// Weight of yesterday's running mean.
    pub running_mean_alpha: f64,
}

impl Default for ComfortSettings {
    fn default() -> Self {
        Self {
            category: Category::II,
            seasons: SeasonScheme::meteorological(),
            running_mean_alpha: 0.8,
        }
    }
}

/// Sum degree-hours over a year of operative temperatures; hour `h` is judged
/// against the running mean of day `h / 24`.
pub fn aggregate(
    t_op: &[f64],
    theta_rm_daily: &[f64],
    category: Category,
    scheme: &SeasonScheme,
) -> Result<SeasonalBreakdown, ComfortError> {
    if t_op.len() != HOURS_PER_YEAR || theta_rm_daily.len() * 24 != t_op.len() {
        return Err(ComfortError::LengthMismatch {
            hours: t_op.len(),
            days: theta_rm_daily.len(),
        });
    }
    let mut out = SeasonalBreakdown::default();
    for (day, (temps, &rm)) in t_op.chunks_exact(24).zip(theta_rm_daily).enumerate() {
        let limits = comfort_limits(rm, category);
        let season = scheme.season_of(month_of_hour_index(day * 24))?;
        let acc = out.season_mut(season);
        for &t in temps {
            *acc += degree_hours_hour(t, &limits);
        }
    }
    Ok(SeasonalBreakdown::from_seasons(
        out.winter, out.spring, out.summer, out.autumn,
    ))
}
