#pragma once

#include <stdexcept>
#include <string>

namespace newspulse {

// Base class for all recoverable pipeline errors. Subcommands map these
// to exit code 2 (data error), as opposed to usage errors (exit 1).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define NEWSPULSE_DEFINE_ERROR(Name)                                  \
    class Name : public Error {                                       \
    public:                                                           \
        explicit Name(const std::string& msg)                         \
            : Error(std::string(#Name) + ": " + msg) {}               \
    }

// ingest
NEWSPULSE_DEFINE_ERROR(MalformedFeed);
NEWSPULSE_DEFINE_ERROR(UnsupportedFormat);
NEWSPULSE_DEFINE_ERROR(EmptyBody);

// corpus
NEWSPULSE_DEFINE_ERROR(StoreUnavailable);

// geolink
NEWSPULSE_DEFINE_ERROR(SchemaError);
NEWSPULSE_DEFINE_ERROR(ParseError);
NEWSPULSE_DEFINE_ERROR(InvalidPopulation);
NEWSPULSE_DEFINE_ERROR(MissingCounty);

// panel
NEWSPULSE_DEFINE_ERROR(DegenerateColumn);
NEWSPULSE_DEFINE_ERROR(CoverageGap);

// glm
NEWSPULSE_DEFINE_ERROR(Separation);
NEWSPULSE_DEFINE_ERROR(RankDeficient);
NEWSPULSE_DEFINE_ERROR(SingularInformation);

// topics
NEWSPULSE_DEFINE_ERROR(EmptyVocabulary);
NEWSPULSE_DEFINE_ERROR(InsufficientSpan);
NEWSPULSE_DEFINE_ERROR(Diverged);
NEWSPULSE_DEFINE_ERROR(EmptyWeek);

// report
NEWSPULSE_DEFINE_ERROR(ZeroVariance);
NEWSPULSE_DEFINE_ERROR(IoError);

// cli / config
NEWSPULSE_DEFINE_ERROR(ConfigError);

#undef NEWSPULSE_DEFINE_ERROR

} // namespace newspulse
