/*
 * Copyright (C) 2026 The FAGC Authors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fagc {

enum class ErrorCode {
    DegenerateShape,
    NonFinite,
    DimensionMismatch,
    ParamOutOfRange,
    InsufficientPoints,
    AllDegenerate,
    EmptyTrainingSet,
    NotFitted,
    ZeroVariance,
    CountMismatch,
    ParseError,
    DuplicateId,
    RaggedRow,
    UnmatchedId,
    VersionMismatch,
    KindMismatch,
    LeakageDetected,
    IoError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::DegenerateShape: return "DegenerateShape";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ParamOutOfRange: return "ParamOutOfRange";
    case ErrorCode::InsufficientPoints: return "InsufficientPoints";
    case ErrorCode::AllDegenerate: return "AllDegenerate";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::NotFitted: return "NotFitted";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::RaggedRow: return "RaggedRow";
    case ErrorCode::UnmatchedId: return "UnmatchedId";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::LeakageDetected: return "LeakageDetected";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace fagc
