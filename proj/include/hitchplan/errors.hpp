#pragma once

#include <stdexcept>
#include <string>

namespace hitchplan
{
    /// Base of every error thrown by the library.
    class Error : public std::runtime_error
    {
      public:
        using std::runtime_error::runtime_error;
    };

    /// A model equation was evaluated outside its domain (|hitch angle| or |steer| >= pi/2).
    class DomainError : public Error
    {
      public:
        using Error::Error;
    };

    /// A steering-map denominator vanished.
    class SingularConfiguration : public Error
    {
      public:
        using Error::Error;
    };

    /// The hitch-dependent virtual steering interval is empty.
    class EmptySteerRange : public Error
    {
      public:
        using Error::Error;
    };

    /// Malformed parameters, grid specification or scenario content.
    class InvalidSpec : public Error
    {
      public:
        using Error::Error;
    };

    /// The planner start pose collides or is already past the hitch cap.
    class InvalidStart : public Error
    {
      public:
        using Error::Error;
    };
} // namespace hitchplan
