#ifndef GSAUDIT_ERROR_HPP
#define GSAUDIT_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

/**
 * @file error.hpp
 * @brief Error codes and the exception type thrown by every gsaudit routine.
 */

namespace gsaudit {

enum class Errc {
    // corpus
    DuplicateGeneId,
    DuplicateSample,
    MalformedCell,
    RaggedRow,
    MissingLabel,
    TooManyConditions,
    EmptyGroup,
    DuplicateSetName,
    MalformedLine,
    DuplicateSource,
    FileNotFound,
    // preprocess
    ZeroLibrary,
    AllGenesFiltered,
    UnmappedGene,
    NoReferenceGenes,
    InvalidRule,
    // diffexpr
    DegenerateDesign,
    InvalidP,
    // enrichment
    InvalidContingency,
    NonpositiveOdds,
    EmptyUniverse,
    DegeneratePwf,
    BiasUnavailable,
    EmptySetInList,
    NoComplement,
    EmptyCollectionAfterFilter,
    EmptyTable,
    // multiverse
    UnknownEngine,
    UnknownChoice,
    SearchSpaceTooLarge,
    // study
    InsufficientPermutations,
    EmptyReport,
    // synthdata
    MissingSets,
    InvalidSpec,
    // configuration
    InvalidConfig,
    WriteFailed
};

inline constexpr std::string_view errc_name(Errc code) {
    switch (code) {
        case Errc::DuplicateGeneId: return "DuplicateGeneId";
        case Errc::DuplicateSample: return "DuplicateSample";
        case Errc::MalformedCell: return "MalformedCell";
        case Errc::RaggedRow: return "RaggedRow";
        case Errc::MissingLabel: return "MissingLabel";
        case Errc::TooManyConditions: return "TooManyConditions";
        case Errc::EmptyGroup: return "EmptyGroup";
        case Errc::DuplicateSetName: return "DuplicateSetName";
        case Errc::MalformedLine: return "MalformedLine";
        case Errc::DuplicateSource: return "DuplicateSource";
        case Errc::FileNotFound: return "FileNotFound";
        case Errc::ZeroLibrary: return "ZeroLibrary";
        case Errc::AllGenesFiltered: return "AllGenesFiltered";
        case Errc::UnmappedGene: return "UnmappedGene";
        case Errc::NoReferenceGenes: return "NoReferenceGenes";
        case Errc::InvalidRule: return "InvalidRule";
        case Errc::DegenerateDesign: return "DegenerateDesign";
        case Errc::InvalidP: return "InvalidP";
        case Errc::InvalidContingency: return "InvalidContingency";
        case Errc::NonpositiveOdds: return "NonpositiveOdds";
        case Errc::EmptyUniverse: return "EmptyUniverse";
        case Errc::DegeneratePwf: return "DegeneratePwf";
        case Errc::BiasUnavailable: return "BiasUnavailable";
        case Errc::EmptySetInList: return "EmptySetInList";
        case Errc::NoComplement: return "NoComplement";
        case Errc::EmptyCollectionAfterFilter: return "EmptyCollectionAfterFilter";
        case Errc::EmptyTable: return "EmptyTable";
        case Errc::UnknownEngine: return "UnknownEngine";
        case Errc::UnknownChoice: return "UnknownChoice";
        case Errc::SearchSpaceTooLarge: return "SearchSpaceTooLarge";
        case Errc::InsufficientPermutations: return "InsufficientPermutations";
        case Errc::EmptyReport: return "EmptyReport";
        case Errc::MissingSets: return "MissingSets";
        case Errc::InvalidSpec: return "InvalidSpec";
        case Errc::InvalidConfig: return "InvalidConfig";
        case Errc::WriteFailed: return "WriteFailed";
    }
    return "Unknown";
}

/**
 * Exception carrying a machine-readable error code.
 * The message is prefixed with the code name, e.g. `MalformedCell: row 3, column 2`.
 */
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& detail) :
        std::runtime_error(std::string(errc_name(code)) + (detail.empty() ? "" : ": " + detail)),
        my_code(code) {}

    Errc code() const noexcept { return my_code; }

private:
    Errc my_code;
};

/**
 * Input-validation failures: the CLI maps these to exit status 2.
 */
inline bool is_validation_error(Errc code) {
    switch (code) {
        case Errc::DuplicateGeneId:
        case Errc::DuplicateSample:
        case Errc::MalformedCell:
        case Errc::RaggedRow:
        case Errc::MissingLabel:
        case Errc::TooManyConditions:
        case Errc::EmptyGroup:
        case Errc::DuplicateSetName:
        case Errc::MalformedLine:
        case Errc::DuplicateSource:
        case Errc::FileNotFound:
        case Errc::UnknownEngine:
        case Errc::InvalidSpec:
        case Errc::MissingSets:
        case Errc::InvalidConfig:
            return true;
        default:
            return false;
    }
}

}

#endif
