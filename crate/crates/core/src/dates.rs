//! Model-time conventions: one unit of time is one day, and day 0 is
//! 17 February 2020. Dates are stored as integer day offsets from that epoch.

use chrono::NaiveDate;

/// Calendar date of model day 0.
pub fn epoch() -> NaiveDate {
    NaiveDate::from_ymd_opt(2020, 2, 17).expect("valid epoch date")
}

/// Day offset of a calendar date relative to the model epoch.
pub fn day_of(date: NaiveDate) -> i64 {
    (date - epoch()).num_days()
}

/// Calendar date of a model day.
pub fn date_of(day: i64) -> NaiveDate {
    epoch() + chrono::Duration::days(day)
}

/// True for Saturdays and Sundays (the symptom-report feed publishes
/// weekdays only).
pub fn is_weekend(day: i64) -> bool {
    use chrono::Datelike;
    matches!(
        date_of(day).weekday(),
        chrono::Weekday::Sat | chrono::Weekday::Sun
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_offsets() {
        assert_eq!(day_of(NaiveDate::from_ymd_opt(2020, 2, 17).unwrap()), 0);
        assert_eq!(day_of(NaiveDate::from_ymd_opt(2020, 3, 24).unwrap()), 36);
        assert_eq!(day_of(NaiveDate::from_ymd_opt(2020, 6, 16).unwrap()), 120);
        assert_eq!(day_of(NaiveDate::from_ymd_opt(2020, 12, 31).unwrap()), 318);
        assert_eq!(day_of(NaiveDate::from_ymd_opt(2021, 1, 21).unwrap()), 339);
        assert_eq!(date_of(36), NaiveDate::from_ymd_opt(2020, 3, 24).unwrap());
    }

    #[test]
    fn epoch_is_a_monday() {
        assert!(!is_weekend(0));
        assert!(is_weekend(5)); // 22 Feb 2020, Saturday
        assert!(is_weekend(6));
        assert!(!is_weekend(7));
    }
}
