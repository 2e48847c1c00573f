from fraclog.errors import DomainError, NotCertifiedError, SolverError
