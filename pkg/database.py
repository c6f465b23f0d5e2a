"""
Run ledger: database models and operations for sample runs and comparisons
"""
import json
import logging
from datetime import datetime
from typing import List, Optional

from sqlalchemy import Column, DateTime, Float, Integer, String, Text, create_engine
from sqlalchemy.orm import declarative_base, sessionmaker

from config import Config

Base = declarative_base()


class SampleRun(Base):
    """One sampling command: provenance and summary of the scaled values"""
    __tablename__ = 'sample_runs'

    id = Column(Integer, primary_key=True)
    model = Column(String(20), nullable=False)
    params = Column(Text)  # JSON
    seed = Column(String(20), nullable=False)  # unsigned 64-bit does not fit a signed INTEGER
    count = Column(Integer, nullable=False)
    version = Column(String(20))
    mean = Column(Float)
    sd = Column(Float)
    skewness = Column(Float)
    excess_kurtosis = Column(Float)
    created_at = Column(DateTime, default=datetime.utcnow)


class Comparison(Base):
    """KS comparison of a sample against F_beta"""
    __tablename__ = 'comparisons'

    id = Column(Integer, primary_key=True)
    sample_run_id = Column(Integer)
    model = Column(String(20), nullable=False)
    beta = Column(Integer, nullable=False)
    ks = Column(Float, nullable=False)
    n = Column(Integer, nullable=False)
    mean = Column(Float)
    sd = Column(Float)
    skewness = Column(Float)
    excess_kurtosis = Column(Float)
    created_at = Column(DateTime, default=datetime.utcnow)


class DatabaseManager:
    """Database manager class for the run ledger; the engine is created on first use"""

    def __init__(self, database_url: Optional[str] = None):
        self.database_url = database_url or Config.DATABASE_URL
        self.engine = None
        self.Session = None
        self.logger = logging.getLogger(__name__)

    def configure(self, database_url: str):
        """Point the ledger at another database"""
        self.dispose()
        self.database_url = database_url

    def get_session(self):
        """Get a database session"""
        if self.engine is None:
            self.engine = create_engine(self.database_url)
            Base.metadata.create_all(self.engine)
            self.Session = sessionmaker(bind=self.engine)
            self.logger.info(f"Run ledger opened at {self.database_url}")
        return self.Session()

    def record_sample_run(self, sample_set, stats=None) -> SampleRun:
        """Store a SampleSet's provenance with its summary statistics (if any)"""
        session = self.get_session()
        try:
            run = SampleRun(
                model=sample_set.model,
                params=json.dumps(sample_set.params, sort_keys=True),
                seed=str(sample_set.seed),
                count=len(sample_set.values),
                version=sample_set.version,
                mean=stats.mean if stats else None,
                sd=stats.sd if stats else None,
                skewness=stats.skewness if stats else None,
                excess_kurtosis=stats.excess_kurtosis if stats else None,
            )
            session.add(run)
            session.commit()
            # Force loading of all attributes before detaching
            session.refresh(run)
            session.expunge(run)
            self.logger.info(f"Sample run {run.id} recorded ({run.model}, seed {run.seed})")
            return run

        except Exception as e:
            session.rollback()
            self.logger.error(f"Error recording sample run for {sample_set.model}: {e}")
            raise
        finally:
            session.close()

    def record_comparison(self, model: str, beta: int, ks: float, stats,
                          sample_run_id: Optional[int] = None) -> Comparison:
        """Store a KS comparison result"""
        session = self.get_session()
        try:
            comparison = Comparison(
                sample_run_id=sample_run_id,
                model=model,
                beta=beta,
                ks=ks,
                n=stats.n,
                mean=stats.mean,
                sd=stats.sd,
                skewness=stats.skewness,
                excess_kurtosis=stats.excess_kurtosis,
            )
            session.add(comparison)
            session.commit()
            session.refresh(comparison)
            session.expunge(comparison)
            self.logger.info(f"Comparison {comparison.id} recorded ({model} vs beta={beta}, KS={ks:.4f})")
            return comparison

        except Exception as e:
            session.rollback()
            self.logger.error(f"Error recording comparison for {model}: {e}")
            raise
        finally:
            session.close()

    def get_recent_runs(self, limit: int = 20) -> List[SampleRun]:
        """Most recent sample runs first"""
        session = self.get_session()
        try:
            runs = session.query(SampleRun).order_by(SampleRun.id.desc()).limit(limit).all()
            for run in runs:
                session.expunge(run)
            return runs
        except Exception as e:
            self.logger.error(f"Error fetching sample runs: {e}")
            return []
        finally:
            session.close()

    def get_comparisons(self, model: Optional[str] = None) -> List[Comparison]:
        """Comparisons, optionally for one model, most recent first"""
        session = self.get_session()
        try:
            query = session.query(Comparison)
            if model is not None:
                query = query.filter_by(model=model)
            comparisons = query.order_by(Comparison.id.desc()).all()
            for comparison in comparisons:
                session.expunge(comparison)
            return comparisons
        except Exception as e:
            self.logger.error(f"Error fetching comparisons: {e}")
            return []
        finally:
            session.close()

    def dispose(self):
        if self.engine is not None:
            self.engine.dispose()
            self.engine = None
            self.Session = None


# Global database manager instance
db_manager = DatabaseManager()
