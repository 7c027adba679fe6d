"""MedBook: an appointment-booking service.

Patients register, browse hospitals and doctors, and reserve fixed-length
time slots; staff cancellations land in the patient's notification feed.
Admins manage the catalog and see every appointment. The HTTP surface lives
in medbook.api, the operator CLI in medbook.cli.
"""

__version__ = "0.1.0"
